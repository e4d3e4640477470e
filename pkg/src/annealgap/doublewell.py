"""Scale-free piecewise-parabolic double wells.

Lengths are in units of the summit width sigma*, energies in units of hbar
omega*.  The summit is the inverted unit parabola ``V = -xi^2/2`` (value 0 at
``xi = 0``); the wells are upright parabolas of curvature ``1/beta_i^4`` with
minima at ``-xi1`` and ``+xi2``, joined to the summit with matching value and
slope.  States solve ``-phi''/2 + V phi = E phi`` and the energy deficit below
the summit is ``delta = -E``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.optimize import brentq, minimize_scalar

from .exceptions import BracketError, ConvergenceError, SymmetryError
from .specfun import (
    parabolic_cylinder_derivative,
    special_parabolic_cylinder,
    summit_ground_kummer,
    summit_ground_kummer_derivative,
)

__all__ = [
    "PiecewiseWell",
    "build_well",
    "WellSpectrum",
    "solve_well",
    "gap_via_overlap_formula",
    "ground_deficit",
    "stitched_ground_deficit",
    "RayleighCheck",
    "rayleigh_check",
    "resonance_match",
    "IsoGapScan",
    "iso_gap_scan",
    "migration_time",
    "special_parabolic_cylinder",
]

DEFAULT_POINTS = 4001
PAD_WIDTHS = 8.0


@dataclass(frozen=True)
class PiecewiseWell:
    xi1: float
    xi2: float
    beta1: float
    beta2: float

    def __post_init__(self):
        if min(self.xi1, self.xi2) < 0 or min(self.beta1, self.beta2) <= 0:
            raise ValueError("well displacements must be >= 0 and widths > 0")

    @property
    def seams(self):
        return (-self.xi1 / (1.0 + self.beta1**4), self.xi2 / (1.0 + self.beta2**4))

    @property
    def barriers(self):
        """Barrier heights V0 seen from the left and right well bottoms."""
        return (self.xi1**2 / (2.0 * (1.0 + self.beta1**4)),
                self.xi2**2 / (2.0 * (1.0 + self.beta2**4)))

    @property
    def frequencies(self):
        """Well frequencies omega_i / omega* = 1 / beta_i^2."""
        return (1.0 / self.beta1**2, 1.0 / self.beta2**2)

    @property
    def is_symmetric(self):
        return self.xi1 == self.xi2 and self.beta1 == self.beta2

    def potential(self, xi):
        xi = np.asarray(xi, dtype=float)
        left, right = self.seams
        v0l, v0r = self.barriers
        v = -0.5 * xi * xi
        v = np.where(xi < left, (xi + self.xi1) ** 2 / (2.0 * self.beta1**4) - v0l, v)
        return np.where(xi > right, (xi - self.xi2) ** 2 / (2.0 * self.beta2**4) - v0r, v)

    def derivative(self, xi):
        xi = np.asarray(xi, dtype=float)
        left, right = self.seams
        d = -xi
        d = np.where(xi < left, (xi + self.xi1) / self.beta1**4, d)
        return np.where(xi > right, (xi - self.xi2) / self.beta2**4, d)


def build_well(xi1, xi2=None, beta1=1.0, beta2=None) -> PiecewiseWell:
    """Build a well; omitted right-hand parameters copy the left ones."""
    return PiecewiseWell(float(xi1), float(xi1 if xi2 is None else xi2),
                         float(beta1), float(beta1 if beta2 is None else beta2))


@dataclass(frozen=True)
class WellSpectrum:
    well: PiecewiseWell
    energies: np.ndarray
    grid: np.ndarray = field(repr=False)
    eigenfunctions: np.ndarray = field(repr=False)  # columns, unit L2 norm on the grid

    @property
    def deficits(self):
        return -self.energies

    @property
    def epsilon(self):
        """Energies above the deeper well bottom."""
        return self.energies + max(self.well.barriers)

    @property
    def gap_ratio(self):
        return float(self.energies[1] - self.energies[0])

    @property
    def spacing(self):
        return float(self.grid[1] - self.grid[0])


def _orient(phi, grid, h):
    """phi(0) > 0 for states that do not vanish at 0, else phi'(0) > 0."""
    i = int(np.clip(np.searchsorted(grid, 0.0), 1, len(grid) - 2))
    value = np.interp(0.0, grid, phi)
    slope = (phi[i + 1] - phi[i - 1]) / (2 * h)
    if abs(value) > 1e-8 * np.abs(phi).max():
        return phi if value > 0 else -phi
    return phi if slope > 0 else -phi


def solve_well(well: PiecewiseWell, k=2, n=DEFAULT_POINTS, check_convergence=False) -> WellSpectrum:
    """Lowest k states by second-order finite differences on a padded grid.

    The grid spans ``[-xi1 - 8 beta1, xi2 + 8 beta2]`` with Dirichlet ends and
    an odd number of interior points, so ``xi = 0`` is a node of symmetric wells.
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = int(n) | 1
    lo = -well.xi1 - PAD_WIDTHS * well.beta1
    hi = well.xi2 + PAD_WIDTHS * well.beta2
    grid = np.linspace(lo, hi, n + 2)[1:-1]
    h = grid[1] - grid[0]
    try:
        w, v = eigh_tridiagonal(1.0 / h**2 + well.potential(grid), np.full(n - 1, -0.5 / h**2),
                                select="i", select_range=(0, k - 1))
    except LinAlgError as exc:
        raise ConvergenceError("well eigensolver failed", {"well": well, "n": n}) from exc
    v = v / math.sqrt(h)
    for i in range(k):
        v[:, i] = _orient(v[:, i], grid, h)
    if check_convergence:
        coarse = solve_well(well, k, n // 2, False)
        drift = np.max(np.abs(coarse.energies - w))
        # second-order scheme: the fine-grid error is about a third of the drift
        if drift / 3.0 > 1e-4 * max(1.0, np.abs(w).max()):
            raise ConvergenceError("well spectrum not grid-converged", {"drift": drift, "n": n})
    return WellSpectrum(well, w, grid, v)


def gap_via_overlap_formula(spectrum: WellSpectrum) -> float:
    """Gap from the ground-doublet semi-overlap.

    Delta = phi+(0) phi-'(0) / (2 int_0^inf phi+ phi- dxi), evaluated with the
    central difference at 0 and the trapezoid rule, which makes it the exact
    Green identity of the discrete problem.
    """
    if not spectrum.well.is_symmetric:
        raise SymmetryError("the overlap gap formula requires a symmetric well")
    if spectrum.eigenfunctions.shape[1] < 2:
        raise ValueError("need the two lowest states")
    grid, h = spectrum.grid, spectrum.spacing
    i0 = int(np.argmin(np.abs(grid)))
    if abs(grid[i0]) > 1e-9 * h:
        raise ValueError("xi = 0 is not a grid node")
    plus, minus = spectrum.eigenfunctions[:, 0], spectrum.eigenfunctions[:, 1]
    slope = (minus[i0 + 1] - minus[i0 - 1]) / (2.0 * h)
    overlap = h * np.dot(plus[i0 + 1:], minus[i0 + 1:]) + 0.5 * h * plus[i0] * minus[i0]
    return float(plus[i0] * slope / (2.0 * overlap))


def ground_deficit(xi, beta, n=DEFAULT_POINTS) -> float:
    """delta+ of the symmetric well (xi, beta)."""
    return float(-solve_well(build_well(xi, beta1=beta), 1, n).energies[0])


def stitched_ground_deficit(xi, beta, step=0.02):
    """delta+ of a symmetric well from the special-function construction.

    The even summit solution (Kummer) and the decaying well solution (Weber
    D_nu) are matched through their Wronskian at the seam; the ground state is
    the largest root in delta.  Independent of the finite-difference solver.
    """
    well = build_well(xi, beta1=beta)
    seam = well.seams[1]
    v0 = well.barriers[0]
    scale = math.sqrt(2.0) / beta

    def wronskian(delta):
        nu = beta**2 * (v0 - delta) - 0.5
        u = scale * (seam - xi)
        ps, dps = summit_ground_kummer(delta, seam), summit_ground_kummer_derivative(delta, seam)
        pw = special_parabolic_cylinder(nu, u)
        dpw = scale * parabolic_cylinder_derivative(nu, u)
        return ps * dpw - dps * pw

    top = v0 + 0.5 / beta**2  # nu = -1: no normalizable well state above this deficit
    hi = top - 1e-9
    f_hi = wronskian(hi)
    lo = hi
    floor = -0.5 / beta**2 - 1.0
    while lo > floor:
        lo = hi - step
        f_lo = wronskian(lo)
        if np.sign(f_lo) != np.sign(f_hi):
            return brentq(wronskian, lo, hi, xtol=1e-13, rtol=1e-13)
        hi, f_hi = lo, f_lo
    raise BracketError("no matching deficit found", scanned=(floor, top))


@dataclass(frozen=True)
class RayleighCheck:
    separated: bool
    margins: tuple


def rayleigh_check(well: PiecewiseWell, hbar_eff=None) -> RayleighCheck:
    """Per-side Rayleigh margins xi_i/beta_i - 1.

    In scale-free units the well-to-summit distance z_i and the well width
    sigma_i are already divided by sigma*, so ``hbar_eff`` only enters through
    the construction of (xi, beta) and is accepted for symmetry with callers
    holding physical quantities.
    """
    margins = (well.xi1 / well.beta1 - 1.0, well.xi2 / well.beta2 - 1.0)
    return RayleighCheck(all(m > 0 for m in margins), margins)


def resonance_match(beta1, beta2, xi1, tol=1e-8, n=DEFAULT_POINTS):
    """xi2 such that the symmetric wells (xi1, beta1) and (xi2, beta2) share delta+.

    Solved by bisection on the monotone map xi -> delta+(xi, beta2).
    """
    if min(beta1, beta2, xi1) <= 0:
        raise ValueError("parameters must be positive")
    target = ground_deficit(xi1, beta1, n)
    if beta1 == beta2:
        return float(xi1)
    f = lambda x: ground_deficit(x, beta2, n) - target
    lo, f_lo = 0.0, f(0.0)
    if f_lo > 0:
        raise BracketError("target deficit lies below the single-parabola limit", scanned=(0.0, f_lo))
    hi = max(2.0 * xi1, 1.0)
    f_hi = f(hi)
    while f_hi < 0:
        lo, f_lo = hi, f_hi
        hi *= 2.0
        if hi > 1e3:
            raise BracketError("no bracketing displacement found", scanned=(lo, f_lo))
        f_hi = f(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if abs(f_mid) <= tol or hi - lo < 1e-14:
            return float(mid)
        if f_mid < 0:
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


@dataclass(frozen=True)
class IsoGapScan:
    xi1: np.ndarray
    beta: np.ndarray
    gap_ratio: np.ndarray  # shape (len(xi1), len(beta)), NaN where the cell failed
    beta_star: np.ndarray  # refined argmax over beta per xi1, NaN when on the grid edge
    failed: tuple


def _gap_cell(args):
    xi, beta, n = args
    try:
        return solve_well(build_well(xi, beta1=beta), 2, n).gap_ratio
    except ConvergenceError:
        return float("nan")


def _refine_beta(xi, grid, gaps, n):
    i = int(np.nanargmax(gaps))
    if i == 0 or i == len(grid) - 1:
        return float("nan")
    res = minimize_scalar(lambda b: -_gap_cell((xi, b, n)), bracket=(grid[i - 1], grid[i], grid[i + 1]),
                          method="golden", tol=1e-7)
    if grid[i - 1] <= res.x <= grid[i + 1]:
        return float(res.x)
    return float(grid[i])


def iso_gap_scan(xi1_grid, beta_grid, n=DEFAULT_POINTS, refine=True, pmap=map) -> IsoGapScan:
    """Gap ratio raster over symmetric wells and the max-gap locus beta*(xi1)."""
    xs = np.asarray(xi1_grid, dtype=float)
    bs = np.asarray(beta_grid, dtype=float)
    if xs.size == 0 or bs.size == 0 or np.any(xs < 0) or np.any(bs <= 0):
        raise ValueError("grids must be nonempty with xi1 >= 0 and beta > 0")
    jobs = [(float(x), float(b), n) for x in xs for b in bs]
    gaps = np.array(list(pmap(_gap_cell, jobs)), dtype=float).reshape(xs.size, bs.size)
    failed = tuple((float(xs[a]), float(bs[b])) for a, b in zip(*np.nonzero(np.isnan(gaps))))
    star = np.full(xs.size, np.nan)
    for a, x in enumerate(xs):
        if np.all(np.isnan(gaps[a])):
            continue
        if refine and bs.size >= 3:
            star[a] = _refine_beta(x, bs, gaps[a], n)
        else:
            star[a] = bs[int(np.nanargmax(gaps[a]))]
    return IsoGapScan(xs, bs, gaps, star, failed)


def migration_time(gap, hbar_eff=1.0) -> float:
    """Tunnelling period 2 pi hbar / Delta; ``math.inf`` for a closed gap."""
    if gap < 0:
        raise ValueError("gap must be non-negative")
    if gap == 0:
        return math.inf
    return 2.0 * math.pi * hbar_eff / gap
