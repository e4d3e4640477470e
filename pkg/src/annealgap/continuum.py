"""Variable-mass continuum model of the collective spin.

With z = m/j and an effective Planck constant hbar = 1/j, the low-lying spin
spectrum (divided by Gamma) is approximated by the 1D problem

    (1/2) P M^{-1}(z) P psi + V(z) psi = E psi,   P = -i hbar d/dz,

on z in (-1, 1) with Dirichlet conditions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NegativeMassError
from .spectrum import SpectralSummary, lowest_eigenpairs, pspin_gap
from .spinspace import BandedSymmetricMatrix, ControlPoint, SpinParams, two_j_of

__all__ = [
    "potential_v",
    "potential_v_lmg",
    "lmg_barrier",
    "inverse_mass",
    "MassProfile",
    "mass_profile",
    "ContinuumProblem",
    "discretize",
    "solve_continuum",
    "continuum_gap",
    "ComparisonRow",
    "continuum_vs_spin_report",
    "negative_mass_gamma",
]


def _ratio(params: SpinParams) -> float:
    return params.control.ratio  # raises at Gamma = 1


def _check_z(z):
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) > 1.0):
        raise ValueError("z must satisfy |z| <= 1")
    return z


def potential_v(z, params: SpinParams):
    """V(z) = -sqrt(1-z^2) - (k/g) z^p + ((1-k)/g)(1-z^2), in units of Gamma."""
    z = _check_z(z)
    g, k, p = _ratio(params), params.control.kappa, params.p
    return -np.sqrt(1.0 - z * z) - (k / g) * z**p + ((1.0 - k) / g) * (1.0 - z * z)


def potential_v_lmg(z, gamma_x, gamma_z):
    z = _check_z(z)
    if not 0.0 < gamma_x < 1.0:
        raise ValueError("Gamma_x must lie in (0, 1) for the continuum form")
    gx = gamma_x / (1.0 - gamma_x)
    return -np.sqrt(1.0 - z * z) - ((1.0 - abs(gamma_z)) * z * z / gx + z * gamma_z)


def lmg_barrier(gamma_x):
    """Barrier height V(0) - V(z_min) of the symmetric LMG potential.

    Closed form 1/g + g/4 - 1 with g = Gamma_x/(1-Gamma_x), valid for g < 2;
    for g >= 2 the potential has a single minimum and the barrier is zero.
    """
    gx = gamma_x / (1.0 - gamma_x)
    return np.where(gx < 2.0, 1.0 / gx + gx / 4.0 - 1.0, 0.0)


def inverse_mass(z, params: SpinParams):
    """M^{-1}(z) = sqrt(1-z^2) - 2(1-z^2)(1-k)/g."""
    z = _check_z(z)
    g, k = _ratio(params), params.control.kappa
    return np.sqrt(1.0 - z * z) - 2.0 * (1.0 - z * z) * (1.0 - k) / g


@dataclass(frozen=True)
class MassProfile:
    z: np.ndarray
    inv_mass: np.ndarray
    crossings: tuple


def mass_profile(params: SpinParams, z=None) -> MassProfile:
    """Sample M^{-1} and locate its interior zeros.

    Interior zeros come in a symmetric pair at |z| = sqrt(1 - (g/(2(1-k)))^2)
    whenever g < 2(1-k); they merge at z = 0 when g = 2(1-k).
    """
    if z is None:
        z = np.linspace(-1.0, 1.0, 2001)
    inv = inverse_mass(z, params)
    g, k = _ratio(params), params.control.kappa
    crossings = ()
    if k < 1.0:
        s = g / (2.0 * (1.0 - k))  # sqrt(1-z^2) at the zero
        if s <= 1.0 + 1e-12:
            # s within rounding of 1 (e.g. after a Gamma <-> gamma round trip) is the merge point
            zc = 0.0 if abs(1.0 - s) <= 1e-12 else float(np.sqrt(1.0 - s * s))
            crossings = (0.0,) if zc == 0.0 else (-zc, zc)
    return MassProfile(np.asarray(z, dtype=float), inv, crossings)


@dataclass(frozen=True)
class ContinuumProblem:
    """Samples of V and M^{-1} on a uniform interior grid, plus the staggered M^{-1}."""

    grid: np.ndarray
    potential: np.ndarray
    inv_mass: np.ndarray
    inv_mass_mid: np.ndarray
    hbar_eff: float

    def __post_init__(self):
        n = len(self.grid)
        if len(self.potential) != n or len(self.inv_mass) != n or len(self.inv_mass_mid) != n + 1:
            raise ValueError("sample arrays do not match the grid")
        steps = np.diff(self.grid)
        if n > 1 and (np.any(steps <= 0) or np.ptp(steps) > 1e-14 * max(1.0, np.abs(self.grid).max())):
            raise ValueError("grid must be uniform and strictly ascending")
        if self.hbar_eff <= 0:
            raise ValueError("hbar_eff must be positive")
        if not np.all(np.isfinite(self.potential)):
            raise ValueError("potential must be finite on the grid")

    @property
    def spacing(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @classmethod
    def from_functions(cls, potential, inv_mass, hbar_eff, lo=-1.0, hi=1.0, n=1001):
        """Sample callables on ``n`` interior points of [lo, hi] (endpoints excluded)."""
        full = np.linspace(lo, hi, n + 2)
        mid = 0.5 * (full[:-1] + full[1:])
        z = full[1:-1]
        return cls(z, np.asarray(potential(z), float), np.asarray(inv_mass(z), float),
                   np.asarray(inv_mass(mid), float), float(hbar_eff))

    @classmethod
    def for_spin(cls, params: SpinParams, n=None):
        j = two_j_of(params.j) / 2.0
        if n is None:
            n = max(1001, int(20 * j) + 1)
        return cls.from_functions(lambda z: potential_v(z, params),
                                  lambda z: inverse_mass(z, params), 1.0 / j, n=n)


def discretize(problem: ContinuumProblem) -> BandedSymmetricMatrix:
    """Staggered-midpoint finite differences for P M^{-1} P / 2 + V."""
    bad = problem.inv_mass_mid < 0.0
    if np.any(bad):
        z = problem.grid
        mid = np.concatenate(([z[0] - problem.spacing / 2], z + problem.spacing / 2))
        flips = np.nonzero(np.diff(np.sign(problem.inv_mass_mid)))[0]
        raise NegativeMassError("inverse mass is negative inside the domain",
                                crossings=[float(mid[i]) for i in flips] or [float(mid[bad][0])])
    c = problem.hbar_eff**2 / (2.0 * problem.spacing**2)
    mi = problem.inv_mass_mid
    diag = problem.potential + c * (mi[:-1] + mi[1:])
    off = -c * mi[1:-1]
    return BandedSymmetricMatrix.from_diagonals(diag, off)


def solve_continuum(problem: ContinuumProblem, k=2) -> SpectralSummary:
    return lowest_eigenpairs(discretize(problem), k)


def continuum_gap(params: SpinParams, n=None) -> float:
    """Delta01 of the continuum model converted to spin-Hamiltonian units (times Gamma)."""
    summary = lowest_eigenpairs(discretize(ContinuumProblem.for_spin(params, n)), 2, vectors=False)
    return params.control.gamma_field * summary.delta01


@dataclass(frozen=True)
class ComparisonRow:
    gamma_field: float
    kappa: float
    spin_gap: float
    continuum_gap: float
    rel_diff: float
    status: str  # "ok", "gamma_one", "negative_mass", "small_kappa", "gamma_zero"


def _compare_point(args):
    j, p, g, k, kappa_min = args
    spin = pspin_gap(j, p, g, k) if two_j_of(j) > 0 else float("nan")
    nan = float("nan")
    if g >= 1.0:
        return ComparisonRow(g, k, spin, nan, nan, "gamma_one")
    if g <= 0.0:
        return ComparisonRow(g, k, spin, nan, nan, "gamma_zero")
    params = SpinParams(j, p, ControlPoint(g, k))
    if params.control.ratio < 2.0 * (1.0 - k):
        return ComparisonRow(g, k, spin, nan, nan, "negative_mass")
    cont = continuum_gap(params)
    rel = abs(cont - spin) / spin if spin > 0 else nan
    status = "small_kappa" if k < kappa_min else "ok"
    return ComparisonRow(g, k, spin, cont, rel, status)


def continuum_vs_spin_report(j, p, gamma_grid, kappa_grid, kappa_min=0.05, pmap=map):
    """Compare spin and continuum Delta01 over a control grid.

    Rows whose status is not ``"ok"`` are outside the continuum model's domain
    (Gamma = 0 or 1, negative mass) or in the anomalous small-kappa strip, and
    should be excluded from agreement statistics.
    """
    jobs = [(j, p, float(g), float(k), kappa_min) for g in gamma_grid for k in kappa_grid]
    return list(pmap(_compare_point, jobs))


def negative_mass_gamma(kappa):
    """Annealing ratio below which M^{-1}(0) < 0; equals 2(1 - kappa)."""
    return 2.0 * (1.0 - kappa)
