"""Collective-spin operators and annealing Hamiltonians in the symmetric subspace.

Basis states are ``|m>`` for ``m = -j, ..., +j`` in ascending order.  All
matrices are stored in lower band form, ``bands[k, i] = M[i + k, i]``, which
is the layout ``scipy.linalg.eig_banded(lower=True)`` expects.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

__all__ = [
    "BandedSymmetricMatrix",
    "ControlPoint",
    "SpinParams",
    "SpinVectorStats",
    "two_j_of",
    "m_values",
    "build_jz",
    "build_jx",
    "pspin_terms",
    "build_pspin_hamiltonian",
    "build_lmg_hamiltonian",
    "mean_field_energy",
    "coherent_state",
    "expectation",
    "spin_vector_stats",
]


def two_j_of(j) -> int:
    """Return the integer 2j, rejecting anything that is not a half-integer."""
    if isinstance(j, Fraction):
        doubled = 2 * j
        if doubled.denominator != 1 or doubled < 0:
            raise ValueError(f"j={j} is not a non-negative half-integer")
        return int(doubled)
    doubled = 2.0 * float(j)
    two_j = int(round(doubled))
    if abs(doubled - two_j) > 1e-12 or two_j < 0:
        raise ValueError(f"j={j} is not a non-negative half-integer")
    return two_j


def m_values(two_j: int) -> np.ndarray:
    return np.arange(-two_j, two_j + 1, 2) / 2.0


@dataclass(frozen=True)
class BandedSymmetricMatrix:
    """Real symmetric matrix held as its lower bands.

    ``bands`` has shape ``(bandwidth + 1, dim)``; row ``k`` holds the k-th
    subdiagonal padded with zeros at the end.
    """

    bands: np.ndarray

    def __post_init__(self):
        bands = np.array(self.bands, dtype=float, copy=True)
        if bands.ndim != 2:
            raise ValueError("bands must be a 2-D array")
        for k in range(1, bands.shape[0]):
            bands[k, bands.shape[1] - k:] = 0.0
        bands.setflags(write=False)
        object.__setattr__(self, "bands", bands)

    @property
    def dim(self) -> int:
        return self.bands.shape[1]

    @property
    def bandwidth(self) -> int:
        return self.bands.shape[0] - 1

    @classmethod
    def from_diagonals(cls, *diagonals):
        """Build from the main diagonal followed by successive subdiagonals."""
        dim = len(diagonals[0])
        bands = np.zeros((len(diagonals), dim))
        for k, d in enumerate(diagonals):
            bands[k, : dim - k] = d
        return cls(bands)

    @classmethod
    def from_dense(cls, matrix, tol=0.0):
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        n = a.shape[0]
        bw = 0
        for k in range(1, n):
            if np.any(np.abs(np.diag(a, -k)) > tol) or np.any(np.abs(np.diag(a, k)) > tol):
                bw = k
        return cls.from_diagonals(*[np.diag(a, -k) for k in range(bw + 1)])

    def diagonal(self, k=0) -> np.ndarray:
        return self.bands[abs(k), : self.dim - abs(k)]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        for k in range(self.bandwidth + 1):
            d = self.diagonal(k)
            out += np.diag(d, -k)
            if k:
                out += np.diag(d, k)
        return out

    def matvec(self, v) -> np.ndarray:
        v = np.asarray(v)
        out = self.bands[0] * v
        for k in range(1, self.bandwidth + 1):
            d = self.diagonal(k)
            out[k:] += d * v[:-k]
            out[:-k] += d * v[k:]
        return out

    def norm_inf(self) -> float:
        """Maximum absolute row sum, an upper bound on the spectral norm."""
        rows = np.abs(self.bands[0]).copy()
        for k in range(1, self.bandwidth + 1):
            d = np.abs(self.diagonal(k))
            rows[k:] += d
            rows[:-k] += d
        return float(rows.max()) if rows.size else 0.0

    def _padded(self, bandwidth):
        if bandwidth == self.bandwidth:
            return self.bands
        out = np.zeros((bandwidth + 1, self.dim))
        out[: self.bandwidth + 1] = self.bands
        return out

    def __add__(self, other):
        if not isinstance(other, BandedSymmetricMatrix):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        bw = max(self.bandwidth, other.bandwidth)
        return BandedSymmetricMatrix(self._padded(bw) + other._padded(bw))

    def __mul__(self, scalar):
        return BandedSymmetricMatrix(self.bands * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def square(self):
        """Exact band-limited product ``M @ M`` (bandwidth doubles)."""
        n, b = self.dim, self.bandwidth
        width = min(2 * b, n - 1)
        out = np.zeros((width + 1, n))
        # (M^2)[c+k, c] = sum_t M[c+k, c+t] M[c+t, c]
        for k in range(width + 1):
            c = np.arange(n - k)
            for t in range(k - b, b + 1):
                ok = (c + t >= 0) & (c + t < n)
                cc = c[ok]
                left = self.bands[abs(k - t), cc + min(k, t)]
                right = self.bands[abs(t), cc + min(t, 0)]
                out[k, cc] += left * right
        return BandedSymmetricMatrix(out)

    def reflect(self):
        """Conjugate by the reflection ``|m> -> |-m>`` (reverse the basis)."""
        bands = np.zeros_like(self.bands)
        for k in range(self.bandwidth + 1):
            bands[k, : self.dim - k] = self.diagonal(k)[::-1]
        return BandedSymmetricMatrix(bands)


@dataclass(frozen=True)
class ControlPoint:
    """Location in control space: (Gamma, kappa) or, for LMG, (Gamma_x, Gamma_z)."""

    gamma_field: float
    kappa: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.gamma_field <= 1.0:
            raise ValueError(f"Gamma={self.gamma_field} outside [0, 1]")
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError(f"kappa={self.kappa} outside [0, 1]")

    @property
    def ratio(self) -> float:
        """Annealing ratio gamma = Gamma / (1 - Gamma); undefined at Gamma = 1."""
        if self.gamma_field >= 1.0:
            raise ValueError("annealing ratio undefined at Gamma = 1")
        return self.gamma_field / (1.0 - self.gamma_field)


@dataclass(frozen=True)
class SpinParams:
    j: float
    p: int = 3
    control: ControlPoint = ControlPoint(1.0, 1.0)

    def __post_init__(self):
        two_j_of(self.j)
        if int(self.p) != self.p or self.p < 2:
            raise ValueError(f"interaction power p={self.p} must be an integer >= 2")

    @property
    def two_j(self) -> int:
        return two_j_of(self.j)

    @property
    def n_qubits(self) -> int:
        return self.two_j


def build_jz(j) -> BandedSymmetricMatrix:
    return BandedSymmetricMatrix.from_diagonals(m_values(two_j_of(j)))


def _jx_offdiagonal(two_j: int) -> np.ndarray:
    j = two_j / 2.0
    m = m_values(two_j)[:-1]
    # <m+1|Jx|m> = sqrt((j - m)(j + m + 1)) / 2
    return 0.5 * np.sqrt((j - m) * (j + m + 1.0))


def build_jx(j) -> BandedSymmetricMatrix:
    two_j = two_j_of(j)
    return BandedSymmetricMatrix.from_diagonals(np.zeros(two_j + 1), _jx_offdiagonal(two_j))


@lru_cache(maxsize=64)
def pspin_terms(j, p=3):
    """The three Gamma/kappa independent pieces of the p-spin Hamiltonian.

    Returns ``(Jx/j, (Jz/j)^p, (Jx/j)^2)``, each padded to bandwidth 2, so that
    ``H = -G*A - k(1-G)*P + (1-G)(1-k)*B``.
    """
    two_j = two_j_of(j)
    if int(p) != p or p < 2:
        raise ValueError(f"interaction power p={p} must be an integer >= 2")
    if two_j == 0:
        zero = BandedSymmetricMatrix(np.zeros((3, 1)))
        return zero, zero, zero
    jj = two_j / 2.0
    jx = build_jx(jj) * (1.0 / jj)
    z = m_values(two_j) / jj
    problem = BandedSymmetricMatrix.from_diagonals(z ** int(p))
    pad = lambda m: BandedSymmetricMatrix(m._padded(2))
    return pad(jx), pad(problem), pad(jx.square())


def build_pspin_hamiltonian(params: SpinParams) -> BandedSymmetricMatrix:
    """H = -G Jx/j - k(1-G)(Jz/j)^p + (1-G)(1-k)(Jx/j)^2, bandwidth 2."""
    g, k = params.control.gamma_field, params.control.kappa
    a, z_p, b = pspin_terms(params.two_j / 2.0, int(params.p))
    bands = -g * a.bands - k * (1.0 - g) * z_p.bands + (1.0 - g) * (1.0 - k) * b.bands
    return BandedSymmetricMatrix(bands)


def build_lmg_hamiltonian(j, gamma_x, gamma_z) -> BandedSymmetricMatrix:
    """H = -Gx Jx/j - (1-Gx)[(1-|Gz|)(Jz/j)^2 + Gz Jz/j], bandwidth 1."""
    if not 0.0 <= gamma_x <= 1.0:
        raise ValueError(f"Gamma_x={gamma_x} outside [0, 1]")
    if abs(gamma_z) > 1.0:
        raise ValueError(f"Gamma_z={gamma_z} outside [-1, 1]")
    two_j = two_j_of(j)
    if two_j == 0:
        return BandedSymmetricMatrix(np.zeros((2, 1)))
    jj = two_j / 2.0
    z = m_values(two_j) / jj
    diag = -(1.0 - gamma_x) * ((1.0 - abs(gamma_z)) * z**2 + gamma_z * z)
    off = -gamma_x * _jx_offdiagonal(two_j) / jj
    return BandedSymmetricMatrix.from_diagonals(diag, off)


def mean_field_energy(theta, params: SpinParams):
    """Energy of the product state polarized at angle theta from the x axis."""
    g, k, p = params.control.gamma_field, params.control.kappa, params.p
    c, s = np.cos(theta), np.sin(theta)
    return -g * c - k * (1.0 - g) * s**p + (1.0 - g) * (1.0 - k) * c**2


def coherent_state(theta, j) -> np.ndarray:
    """Amplitudes over m of the spin coherent state pointing along (cos t, 0, sin t).

    theta must lie in [-pi/2, pi/2]; amplitudes are real and non-negative.
    """
    two_j = two_j_of(j)
    if not -np.pi / 2 - 1e-15 <= theta <= np.pi / 2 + 1e-15:
        raise ValueError("theta must lie in [-pi/2, pi/2]")
    polar = np.pi / 2 - theta  # angle from the z axis
    c, s = np.cos(polar / 2), np.sin(polar / 2)
    amp = np.zeros(two_j + 1)
    if s <= 0.0:
        amp[-1] = 1.0
        return amp
    if c <= 0.0:
        amp[0] = 1.0
        return amp
    up = np.arange(two_j + 1)  # j + m
    down = two_j - up
    log_binom = 0.5 * (gammaln(two_j + 1) - gammaln(up + 1) - gammaln(down + 1))
    amp = np.exp(log_binom + up * np.log(c) + down * np.log(s))
    return amp / np.linalg.norm(amp)


def expectation(matrix: BandedSymmetricMatrix, state) -> float:
    state = np.asarray(state)
    return float(np.real(np.vdot(state, matrix.matvec(state))))


@dataclass(frozen=True)
class SpinVectorStats:
    r: float
    theta: float
    delta_r: float
    mean: tuple
    variance: tuple


def spin_vector_stats(state, j, atol=1e-10) -> SpinVectorStats:
    """Mean spin direction and total spread of a state, normalized by j."""
    two_j = two_j_of(j)
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (two_j + 1,):
        raise ValueError(f"state must have length 2j+1 = {two_j + 1}")
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > atol:
        raise ValueError(f"state is not normalized (norm^2 = {norm})")
    jj = two_j / 2.0
    m = m_values(two_j)
    a = _jx_offdiagonal(two_j)
    raise_psi = np.zeros_like(psi)  # J+ psi
    raise_psi[1:] = 2.0 * a * psi[:-1]
    lower_psi = np.zeros_like(psi)  # J- psi
    lower_psi[:-1] = 2.0 * a * psi[1:]
    jx_psi = 0.5 * (raise_psi + lower_psi)
    jy_psi = (raise_psi - lower_psi) / 2j
    jz_psi = m * psi
    means = tuple(float(np.vdot(psi, op).real) for op in (jx_psi, jy_psi, jz_psi))
    seconds = tuple(float(np.vdot(op, op).real) for op in (jx_psi, jy_psi, jz_psi))
    variances = tuple(max(s - mu**2, 0.0) for s, mu in zip(seconds, means))
    if jj == 0:
        return SpinVectorStats(0.0, 0.0, 0.0, means, variances)
    r = float(np.sqrt(sum(mu**2 for mu in means)) / jj)
    theta = float(np.arctan2(means[2], means[0]))
    delta_r = float(np.sqrt(sum(variances)) / jj)
    return SpinVectorStats(r, theta, delta_r, means, variances)
