"""Low-lying spectra of banded symmetric matrices, gap landscapes and the saddle search."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.linalg import LinAlgError, eig_banded
from scipy.optimize import minimize_scalar

from .exceptions import BracketError, ConvergenceError, GridPointError, SymmetryError
from .spinspace import BandedSymmetricMatrix, ControlPoint, pspin_terms, two_j_of

__all__ = [
    "SpectralSummary",
    "GapLandscape",
    "SaddleResult",
    "lowest_eigenpairs",
    "lowest_eigenvalues",
    "parity_resolved_gaps",
    "pspin_gap",
    "pspin_summary",
    "scan_landscape",
    "min_gap_over_gamma",
    "saddle_search",
]

RESIDUAL_TOL = 1e-10


def _fix_sign(vec):
    i = int(np.argmax(np.abs(vec)))
    return vec if vec[i] >= 0 else -vec


@dataclass(frozen=True)
class SpectralSummary:
    """Lowest eigenvalues (ascending) with the gaps above the ground state.

    ``delta01`` and ``delta02`` default to ``E1 - E0`` and ``E2 - E0``; the
    parity-resolved constructor overrides them with the cross-parity and
    same-parity gaps.  Missing levels are reported as NaN.
    """

    eigenvalues: np.ndarray
    delta01: float = float("nan")
    delta02: float = float("nan")
    ground_state: np.ndarray | None = None
    parity_labels: tuple | None = None
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_levels(cls, eigenvalues, ground_state=None, eigenvectors=None):
        w = np.asarray(eigenvalues, dtype=float)
        d01 = float(w[1] - w[0]) if w.size > 1 else float("nan")
        d02 = float(w[2] - w[0]) if w.size > 2 else float("nan")
        return cls(w, d01, d02, ground_state, None, eigenvectors)


def lowest_eigenpairs(matrix: BandedSymmetricMatrix, k: int, vectors=True) -> SpectralSummary:
    """The k lowest eigenpairs, with a residual check on every returned pair."""
    if not 1 <= k <= matrix.dim:
        raise ValueError(f"k={k} must lie in [1, {matrix.dim}]")
    if not np.all(np.isfinite(matrix.bands)):
        raise ValueError("matrix contains non-finite entries")
    try:
        out = eig_banded(matrix.bands, lower=True, eigvals_only=not vectors,
                         select="i", select_range=(0, k - 1), check_finite=False)
    except (LinAlgError, ValueError) as exc:
        raise ConvergenceError("banded eigensolver failed",
                               {"dim": matrix.dim, "bandwidth": matrix.bandwidth, "error": str(exc)}) from exc
    if not vectors:
        return SpectralSummary.from_levels(out)
    w, v = out
    scale = max(matrix.norm_inf(), 1e-300)
    for i in range(v.shape[1]):
        v[:, i] = _fix_sign(v[:, i])
        res = np.linalg.norm(matrix.matvec(v[:, i]) - w[i] * v[:, i])
        if res > RESIDUAL_TOL * scale:
            raise ConvergenceError("eigenpair residual above tolerance",
                                   {"index": i, "residual": res, "norm": scale})
    return SpectralSummary.from_levels(w, v[:, 0].copy(), v)


def lowest_eigenvalues(matrix: BandedSymmetricMatrix, k: int) -> np.ndarray:
    return lowest_eigenpairs(matrix, k, vectors=False).eigenvalues


def _fold(dense, sign):
    """Project onto the reflection sector with eigenvalue ``sign``."""
    n = dense.shape[0]
    half = n // 2
    cols = []
    for i in range(half):
        c = np.zeros(n)
        c[n - 1 - i] = 1.0 / np.sqrt(2.0)
        c[i] = sign / np.sqrt(2.0)
        cols.append(c)
    if n % 2 == 1 and sign > 0:
        c = np.zeros(n)
        c[half] = 1.0
        cols.append(c)
    if not cols:
        return None, None
    basis = np.array(cols).T
    return basis.T @ dense @ basis, basis


def parity_resolved_gaps(matrix: BandedSymmetricMatrix, j, k=3) -> SpectralSummary:
    """Spectrum split by the reflection ``|m> -> |-m>``.

    ``delta01`` is the gap from the ground state to the lowest state of opposite
    parity, ``delta02`` the gap to the next state of the same parity.
    """
    if matrix.dim != two_j_of(j) + 1:
        raise ValueError("matrix dimension does not match 2j+1")
    mismatch = np.max(np.abs(matrix.reflect().bands - matrix.bands))
    if mismatch > 1e-12 * max(1.0, matrix.norm_inf()):
        raise SymmetryError(f"matrix does not commute with the reflection (mismatch {mismatch:.3e})")
    dense = matrix.to_dense()
    levels = []
    for sign, label in ((1.0, "+"), (-1.0, "-")):
        block, basis = _fold(dense, sign)
        if block is None:
            continue
        sub = BandedSymmetricMatrix.from_dense(block, tol=1e-15)
        summary = lowest_eigenpairs(sub, min(k, sub.dim))
        for i, e in enumerate(summary.eigenvalues):
            levels.append((e, label, basis @ summary.eigenvectors[:, i]))
    levels.sort(key=lambda t: (t[0], t[1]))
    levels = levels[:k]
    energies = np.array([t[0] for t in levels])
    labels = tuple(t[1] for t in levels)
    e0, p0 = energies[0], labels[0]
    cross = [e - e0 for e, lab in zip(energies, labels) if lab != p0]
    same = [e - e0 for e, lab in zip(energies[1:], labels[1:]) if lab == p0]
    vecs = np.column_stack([_fix_sign(t[2]) for t in levels])
    return SpectralSummary(
        energies,
        float(cross[0]) if cross else float("nan"),
        float(same[0]) if same else float("nan"),
        vecs[:, 0].copy(),
        labels,
        vecs,
    )


def _pspin_bands(j, p, gamma_field, kappa):
    a, z_p, b = pspin_terms(j, p)
    g, k = gamma_field, kappa
    return -g * a.bands - k * (1.0 - g) * z_p.bands + (1.0 - g) * (1.0 - k) * b.bands


def pspin_gap(j, p, gamma_field, kappa) -> float:
    """Delta01 of the p-spin Hamiltonian; the hot loop of every scan."""
    bands = _pspin_bands(j, p, gamma_field, kappa)
    if bands.shape[1] < 2:
        return float("nan")
    try:
        w = eig_banded(bands, lower=True, eigvals_only=True, select="i",
                       select_range=(0, 1), check_finite=False)
    except LinAlgError as exc:
        raise ConvergenceError("banded eigensolver failed",
                               {"j": j, "gamma": gamma_field, "kappa": kappa}) from exc
    return float(w[1] - w[0])


def pspin_summary(j, p, gamma_field, kappa, k=3, vectors=False) -> SpectralSummary:
    matrix = BandedSymmetricMatrix(_pspin_bands(j, p, gamma_field, kappa))
    return lowest_eigenpairs(matrix, min(k, matrix.dim), vectors=vectors)


@dataclass(frozen=True)
class GapLandscape:
    gamma_axis: np.ndarray
    kappa_axis: np.ndarray
    summaries: np.ndarray  # object array, shape (len(gamma_axis), len(kappa_axis))
    j: float
    p: int

    def __post_init__(self):
        if self.summaries.shape != (len(self.gamma_axis), len(self.kappa_axis)):
            raise ValueError("summaries shape does not match the axes")

    def field(self, name="delta01") -> np.ndarray:
        return np.vectorize(lambda s: getattr(s, name), otypes=[float])(self.summaries)

    @property
    def delta01(self) -> np.ndarray:
        return self.field("delta01")


def _check_axis(grid, name):
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise ValueError(f"{name} grid is empty")
    if np.any(np.diff(g) <= 0):
        raise ValueError(f"{name} grid must be strictly ascending")
    if g[0] < 0.0 or g[-1] > 1.0:
        raise ValueError(f"{name} grid must lie in [0, 1]")
    return g


def _landscape_cell(args):
    j, p, gamma_field, kappa, k = args
    try:
        return pspin_summary(j, p, gamma_field, kappa, k=k)
    except Exception as exc:  # tag any per-point failure with its coordinates
        raise GridPointError(str(exc), {"gamma": gamma_field, "kappa": kappa}) from exc


def scan_landscape(j, p, gamma_grid, kappa_grid, k=3, pmap=map) -> GapLandscape:
    """Evaluate a SpectralSummary at every (Gamma, kappa) grid node.

    ``pmap`` may be any order-preserving map, e.g. ``Executor.map``; cells are
    independent, so the result does not depend on evaluation order.
    """
    two_j_of(j)
    gs = _check_axis(gamma_grid, "Gamma")
    ks = _check_axis(kappa_grid, "kappa")
    jobs = [(j, p, float(g), float(kk), k) for g in gs for kk in ks]
    cells = list(pmap(_landscape_cell, jobs))
    summaries = np.empty(len(cells), dtype=object)
    summaries[:] = cells
    return GapLandscape(gs, ks, summaries.reshape(len(gs), len(ks)), j, int(p))


def min_gap_over_gamma(j, p, kappa, gamma_bounds=(0.3, 1.0), n_grid=141, xtol=1e-9):
    """Minimum over Gamma of Delta01 at fixed kappa: coarse scan, then Brent.

    If the coarse minimum sits on an edge of ``gamma_bounds`` the scan is
    repeated over the whole interval [0, 1] at the same spacing; a minimum on
    the edge of [0, 1] raises BracketError.  Returns ``(gamma_at_min, min_gap)``.
    """
    lo, hi = gamma_bounds
    grid = np.linspace(lo, hi, n_grid)
    gaps = np.array([pspin_gap(j, p, g, kappa) for g in grid])
    i = int(np.argmin(gaps))
    if (i == 0 and lo > 0.0) or (i == n_grid - 1 and hi < 1.0):
        n_full = int(np.ceil((n_grid - 1) / (hi - lo))) + 1
        grid = np.linspace(0.0, 1.0, n_full)
        gaps = np.array([pspin_gap(j, p, g, kappa) for g in grid])
        i = int(np.argmin(gaps))
    if i == 0 or i == len(grid) - 1:
        # the minimum may still lie strictly inside the first or last cell
        cell = (grid[0], grid[1]) if i == 0 else (grid[-2], grid[-1])
        res = minimize_scalar(lambda g: pspin_gap(j, p, g, kappa), bounds=cell,
                              method="bounded", options={"xatol": xtol})
        edge = min(abs(res.x - cell[0]), abs(res.x - cell[1]))
        if res.fun < gaps[i] and edge > 10 * xtol:
            return float(res.x), float(res.fun)
        raise BracketError(f"minimum gap at the Gamma-grid boundary (kappa={kappa})",
                           scanned=(grid, gaps))
    res = minimize_scalar(lambda g: pspin_gap(j, p, g, kappa),
                          bracket=(grid[i - 1], grid[i], grid[i + 1]),
                          method="brent", tol=xtol)
    if res.fun <= gaps[i] and grid[i - 1] <= res.x <= grid[i + 1]:
        return float(res.x), float(res.fun)
    return float(grid[i]), float(gaps[i])


def _profile_point(kappa, j, p, gamma_bounds, n_gamma):
    return min_gap_over_gamma(j, p, kappa, gamma_bounds, n_gamma)


@dataclass(frozen=True)
class SaddleResult:
    control: ControlPoint
    gap: float
    clamped: bool
    kappa_grid: np.ndarray = field(repr=False)
    min_gaps: np.ndarray = field(repr=False)

    @property
    def gamma_c(self):
        return self.control.gamma_field

    @property
    def kappa_c(self):
        return self.control.kappa


def saddle_search(source, p=3, kappa_grid=None, gamma_bounds=(0.3, 1.0), n_gamma=141,
                  tol=1e-6, pmap=map) -> SaddleResult:
    """Maximize over kappa the minimum over Gamma of Delta01.

    ``source`` is either a spin size j (evaluated on demand) or a GapLandscape,
    whose kappa axis then seeds the outer search.  A maximum on the kappa = 1
    edge is reported with ``clamped=True``.
    """
    if isinstance(source, GapLandscape):
        j, p = source.j, source.p
        ks = source.kappa_axis[source.kappa_axis > 0]
    else:
        j = source
        ks = np.linspace(0.02, 1.0, 60) if kappa_grid is None else _check_axis(kappa_grid, "kappa")

    inner = partial(_profile_point, j=j, p=p, gamma_bounds=gamma_bounds, n_gamma=n_gamma)

    profile = list(pmap(inner, ks))
    gaps = np.array([g for _, g in profile])
    i = int(np.argmax(gaps))
    if i == len(ks) - 1:
        if ks[-1] < 1.0:
            raise BracketError("maximum at the upper end of a kappa grid short of 1", scanned=(ks, gaps))
        res = minimize_scalar(lambda k: -inner(k)[1], bounds=(ks[-2], 1.0),
                              method="bounded", options={"xatol": tol})
        if -res.fun > gaps[-1] and res.x < 1.0 - 1e-4:
            kc = float(res.x)
            gc, dc = inner(kc)
            return SaddleResult(ControlPoint(gc, kc), dc, False, ks, gaps)
        gc, dc = profile[-1]
        return SaddleResult(ControlPoint(gc, 1.0), dc, True, ks, gaps)
    if i == 0:
        raise BracketError("maximum at the lower end of the kappa grid", scanned=(ks, gaps))
    res = minimize_scalar(lambda k: -inner(k)[1], bracket=(ks[i - 1], ks[i], ks[i + 1]),
                          method="golden", tol=tol)
    kc = float(res.x)
    if not ks[i - 1] <= kc <= ks[i + 1] or -res.fun < gaps[i]:
        kc = float(ks[i])
    gc, dc = inner(kc)
    return SaddleResult(ControlPoint(gc, kc), dc, False, ks, gaps)
