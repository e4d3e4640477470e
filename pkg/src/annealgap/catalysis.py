"""Phase-boundary curves, small-kappa asymptotics and scaling-law fits for the 3-spin model.

Throughout, ``gamma`` is the annealing ratio Gamma/(1-Gamma) and energies use
the continuum convention (divided by Gamma).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .continuum import inverse_mass, potential_v
from .doublewell import build_well, solve_well
from .exceptions import AnnealGapError, BracketError
from .spectrum import lowest_eigenvalues, min_gap_over_gamma, saddle_search
from .spinspace import ControlPoint, SpinParams, build_lmg_hamiltonian

__all__ = [
    "gamma_zero",
    "gamma_second_order",
    "gamma_classical",
    "FerroExtrema",
    "ferro_minimum",
    "AsymptoticState",
    "small_kappa_state",
    "exact_state",
    "RayleighOptimum",
    "rayleigh_alpha_optimum",
    "ScalingFit",
    "fit_power_law",
    "fit_exponential",
    "fit_kappa_c",
    "fit_gap_scaling",
    "quantum_width_scan",
    "saddle_width_scan",
]

SQRT3 = math.sqrt(3.0)


def gamma_zero(kappa):
    """Annealing ratio at which the ferromagnetic well is born (p = 3)."""
    k = np.asarray(kappa, dtype=float)
    if np.any(k <= 0) or np.any(k > 1):
        raise ValueError("kappa must lie in (0, 1]")
    radicand = (169 * k**4 - 172 * k**3 + 78 * k**2 + 8 * k
                - 2 * (k - 1) * (k * (19 * k - 2) + 1) ** 1.5 - 2)
    out = np.sqrt(radicand) / (6 * k)
    return float(out) if out.ndim == 0 else out


def gamma_second_order(kappa):
    """gamma_2 = 2(1 - kappa): the paramagnetic minimum turns into a maximum."""
    return 2.0 * (1.0 - np.asarray(kappa, dtype=float)) if np.ndim(kappa) else 2.0 * (1.0 - kappa)


def _params(gamma, kappa, p=3):
    return SpinParams(1, p, ControlPoint(gamma / (1.0 + gamma), kappa))


def _v(z, gamma, kappa):
    return float(potential_v(z, _params(gamma, kappa)))


def _v2(z, gamma, kappa):
    """Second derivative of the p = 3 potential."""
    return (1.0 - z * z) ** -1.5 - 6.0 * kappa * z / gamma - 2.0 * (1.0 - kappa) / gamma


def _reduced_slope(z, gamma, kappa):
    # V'(z) / z for p = 3; its positive roots are the nonzero extrema.
    return 1.0 / math.sqrt(1.0 - z * z) - 3.0 * kappa * z / gamma - 2.0 * (1.0 - kappa) / gamma


@dataclass(frozen=True)
class FerroExtrema:
    z1: float  # ferromagnetic minimum
    z_star: float  # summit between the paramagnetic point and z1 (0 when z = 0 is a maximum)


def _require_p3(p):
    if p != 3:
        raise ValueError("only the p = 3 model is supported here")


def ferro_minimum(gamma, kappa, p=3) -> FerroExtrema:
    """Locate the ferromagnetic minimum z1 = sin(theta1) and the summit z*.

    Nonzero extrema solve 1/sqrt(1-z^2) = (3 kappa z + 2(1-kappa))/gamma, i.e.
    sin(theta) = (gamma sec(theta) + 2 kappa - 2)/(3 kappa).
    """
    _require_p3(p)
    if gamma <= 0 or not 0 < kappa <= 1:
        raise ValueError("need gamma > 0 and kappa in (0, 1]")
    c = 3.0 * kappa / gamma
    # the reduced slope is convex with its minimum where z/(1-z^2)^{3/2} = c
    z_m = brentq(lambda z: z / (1.0 - z * z) ** 1.5 - c, 0.0, 1.0 - 1e-16, xtol=1e-16, rtol=1e-15)
    g_m = _reduced_slope(z_m, gamma, kappa)
    if g_m > 0:
        raise BracketError(f"no ferromagnetic minimum: gamma={gamma} exceeds gamma_0", scanned=(z_m, g_m))
    if g_m == 0:
        return FerroExtrema(z_m, z_m)
    f = lambda z: _reduced_slope(z, gamma, kappa)
    z1 = brentq(f, z_m, 1.0 - 1e-16, xtol=1e-16, rtol=1e-15)
    if f(0.0) > 0:
        z_star = brentq(f, 0.0, z_m, xtol=1e-17, rtol=1e-15)
    else:
        z_star = 0.0
    return FerroExtrema(float(z1), float(z_star))


def gamma_classical(kappa, p=3):
    """Annealing ratio at which the two wells have equal depth, V(z1) = V(0)."""
    _require_p3(p)
    lo = max(float(gamma_second_order(kappa)), 0.0)
    hi = gamma_zero(kappa)

    def depth(g):
        return _v(ferro_minimum(g, kappa).z1, g, kappa) - _v(0.0, g, kappa)

    a, b = lo + 1e-6 * hi, hi * (1.0 - 1e-10)
    fa, fb = depth(a), depth(b)
    if fa > 0 or fb < 0:
        raise BracketError("equal-depth condition not bracketed by (gamma_2, gamma_0)", scanned=((a, fa), (b, fb)))
    return float(brentq(depth, a, b, xtol=1e-14, rtol=1e-14))


@dataclass(frozen=True)
class AsymptoticState:
    kappa: float
    x: float
    j: float
    z1: float
    z_star: float
    V0: float
    V00: float
    omega0: float
    omega1: float
    omega_star: float
    inv_m0: float
    inv_m1: float
    inv_m_star: float
    xi1: float
    xi2: float
    beta1: float
    beta2: float

    @property
    def gamma(self):
        return gamma_zero(self.kappa) - (self.x * self.kappa / 2.0) ** 2

    @property
    def alpha(self):
        """Rayleigh coefficient kappa sqrt(j) of the corresponding symmetric map."""
        return self.kappa * math.sqrt(self.j)

    def as_dict(self):
        keys = ("z1", "z_star", "V0", "V00", "omega0", "omega1", "omega_star", "inv_m0",
                "inv_m1", "inv_m_star", "xi1", "xi2", "beta1", "beta2")
        return {k: getattr(self, k) for k in keys}


def small_kappa_state(kappa, x, j=1.0) -> AsymptoticState:
    """Leading-order small-kappa expressions at gamma = gamma_0 - (x kappa/2)^2.

    The scale-free displacements grow like sqrt(j); pass ``j`` to get them for a
    given spin size (the default j = 1 gives the coefficients of sqrt(j)).
    """
    if not 0 < kappa <= 0.2:
        raise ValueError("small-kappa expressions need 0 < kappa <= 0.2")
    if not 0 < x <= 1.07:
        raise ValueError("x must lie in (0, 1.07]")
    k2 = kappa * kappa
    omega0 = (9.0 - x * x) * k2 / 8.0
    return AsymptoticState(
        kappa=kappa, x=x, j=float(j),
        z1=(3.0 + x) * kappa / 2.0,
        z_star=(3.0 - x) * kappa / 2.0,
        V0=kappa**4 / 128.0 * (3.0 - x) ** 3 * (1.0 + x),
        V00=x**3 * kappa**4 / 8.0,
        omega0=omega0,
        omega1=math.sqrt(3.0 * x) / 4.0 * (3.0 + x) * k2,
        omega_star=math.sqrt(3.0 * x) / 4.0 * (3.0 - x) * k2,
        inv_m0=omega0,
        inv_m1=0.75 * (3.0 + x) * k2,
        inv_m_star=0.75 * (3.0 - x) * k2,
        xi1=math.sqrt(j) * (x / 3.0) ** 0.25 * (3.0 - x) / 2.0 * kappa,
        xi2=math.sqrt(j) * x**1.25 * 3.0**-0.25 * kappa,
        beta1=(x / 3.0) ** 0.25,
        beta2=1.0 - 15.0 / 8.0 * x * k2,
    )


def exact_state(kappa, x, j=1.0) -> AsymptoticState:
    """The same quantities computed from the full potential and inverse mass."""
    gamma = gamma_zero(kappa) - (x * kappa / 2.0) ** 2
    ext = ferro_minimum(gamma, kappa)
    params = _params(gamma, kappa)
    v = lambda z: float(potential_v(z, params))
    inv_m = lambda z: float(inverse_mass(z, params))
    omega = lambda z: math.sqrt(abs(_v2(z, gamma, kappa)) * inv_m(z))
    hbar = 1.0 / j
    width = lambda z: math.sqrt(hbar * inv_m(z) / omega(z))
    s0, s1, ss = width(0.0), width(ext.z1), width(ext.z_star)
    return AsymptoticState(
        kappa=kappa, x=x, j=float(j),
        z1=ext.z1, z_star=ext.z_star,
        V0=v(ext.z_star) - v(0.0),
        V00=v(ext.z_star) - v(ext.z1),
        omega0=omega(0.0), omega1=omega(ext.z1), omega_star=omega(ext.z_star),
        inv_m0=inv_m(0.0), inv_m1=inv_m(ext.z1), inv_m_star=inv_m(ext.z_star),
        xi1=ext.z_star / ss, xi2=(ext.z1 - ext.z_star) / ss,
        beta1=s0 / ss, beta2=s1 / ss,
    )


@dataclass(frozen=True)
class RayleighOptimum:
    alpha: float
    peak: float  # max of (gap ratio) * alpha^2
    alpha_grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @property
    def gap_coefficient(self):
        """Limit of Delta_c j^2 implied by the optimum: (sqrt(3)/2) * peak."""
        return SQRT3 / 2.0 * self.peak


def _alpha_objective(alpha, n):
    c = 3.0**-0.25
    well = build_well(alpha * c, alpha * c, 1.0, c)
    return solve_well(well, 2, n).gap_ratio * alpha**2


@lru_cache(maxsize=8)
def _rayleigh_cached(grid, n):
    alphas = np.array(grid)
    values = np.array([_alpha_objective(a, n) for a in alphas])
    d = np.diff(values)
    peaks = [i for i in range(1, len(values) - 1) if d[i - 1] > 0 and d[i] <= 0]
    if not peaks:
        raise BracketError("no interior maximum on the alpha grid", scanned=(alphas, values))
    i = peaks[0]
    res = minimize_scalar(lambda a: -_alpha_objective(a, n), bracket=(alphas[i - 1], alphas[i], alphas[i + 1]),
                          method="brent", tol=1e-8)
    alpha, peak = float(res.x), float(-res.fun)
    if not alphas[i - 1] <= alpha <= alphas[i + 1]:
        alpha, peak = float(alphas[i]), float(values[i])
    return RayleighOptimum(alpha, peak, alphas, values)


def rayleigh_alpha_optimum(alpha_grid=None, n=6001) -> RayleighOptimum:
    """Optimal Rayleigh coefficient of the catalysed 3-spin well map.

    The asymmetric well {xi1, beta1, xi2, beta2} = {a 3^-1/4, 1, a 3^-1/4, 3^-1/4}
    is solved on an alpha grid and (gap ratio) * alpha^2 is maximized.  The
    first interior local maximum is refined with Brent's parabolic method; the
    curve rises again at large alpha, where the two wells fall off resonance.
    """
    grid = np.linspace(0.5, 4.0, 36) if alpha_grid is None else np.asarray(alpha_grid, float)
    return _rayleigh_cached(tuple(float(a) for a in grid), int(n))


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    coefficient: float
    window: tuple
    residual: float
    kind: str = "power"  # "power": y = c x^e ; "exponential": y = c exp(e x)
    x: np.ndarray = field(default=None, repr=False)
    y: np.ndarray = field(default=None, repr=False)
    excluded: tuple = ()
    extras: dict = field(default_factory=dict, repr=False)

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "power":
            return self.coefficient * x**self.exponent
        return self.coefficient * np.exp(self.exponent * x)


def _fit(x, y, log_x, kind, **kw):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.any(y <= 0):
        raise ValueError("need at least two samples with positive values")
    u = np.log(x) if log_x else x
    slope, icpt = np.polyfit(u, np.log(y), 1)
    resid = float(np.max(np.abs(np.log(y) - (slope * u + icpt))))
    return ScalingFit(float(slope), float(math.exp(icpt)), (float(x.min()), float(x.max())),
                      resid, kind, x, y, **kw)


def fit_power_law(x, y, **kw) -> ScalingFit:
    """Least squares of log y against log x."""
    return _fit(x, y, True, "power", **kw)


def fit_exponential(x, y, **kw) -> ScalingFit:
    """Least squares of log y against x."""
    return _fit(x, y, False, "exponential", **kw)


def _saddles(j_list, p, pmap):
    return list(pmap(_saddle_job, [(j, p) for j in j_list]))


def _saddle_job(args):
    j, p = args
    try:
        return saddle_search(j, p)
    except AnnealGapError as exc:
        return exc


def fit_kappa_c(j_list, p=3, pmap=map) -> ScalingFit:
    """Power-law fit of the saddle kappa_c(j); clamped or failed sizes are excluded."""
    results = _saddles(j_list, p, pmap)
    keep, excluded = [], []
    for j, r in zip(j_list, results):
        if isinstance(r, Exception):
            excluded.append((j, f"saddle failure: {r}"))
        elif r.clamped:
            excluded.append((j, "kappa_c clamped at 1"))
        else:
            keep.append((j, r.kappa_c, r))
    if len(keep) < 2:
        raise AnnealGapError(f"too few unclamped sizes to fit: {excluded}")
    js, ks, rs = zip(*keep)
    return fit_power_law(js, ks, excluded=tuple(excluded), extras={"saddles": dict(zip(js, rs))})


def _uncatalysed_gap(args):
    j, p, n_gamma = args
    return min_gap_over_gamma(j, p, 1.0, (0.3, 1.0), n_gamma)[1]


def _lmg_gap02(args):
    j, gamma_x = args
    w = lowest_eigenvalues(build_lmg_hamiltonian(j, gamma_x, 0.0), 3)
    return float(w[2] - w[0])


def fit_gap_scaling(j_list, catalysed=True, model="pspin", p=3, lmg_gamma_x=2.0 / 3.0,
                    n_gamma=701, pmap=map) -> ScalingFit:
    """Scaling of the minimum gap with j.

    * ``model="pspin", catalysed=True``: saddle gap, power law (``extras['scaled_gap']``
      holds Delta_c j^2 per size);
    * ``model="pspin", catalysed=False``: minimum over Gamma at kappa = 1, exponential;
    * ``model="lmg"``: Delta02 at the critical transverse field, power law.
    """
    js = list(j_list)
    if model == "lmg":
        gaps = list(pmap(_lmg_gap02, [(j, lmg_gamma_x) for j in js]))
        return fit_power_law(js, gaps)
    if model != "pspin":
        raise ValueError(f"unknown model {model!r}")
    if not catalysed:
        gaps = list(pmap(_uncatalysed_gap, [(j, p, n_gamma) for j in js]))
        return fit_exponential(js, gaps)
    results = _saddles(js, p, pmap)
    keep = [(j, r) for j, r in zip(js, results) if not isinstance(r, Exception)]
    excluded = tuple((j, str(r)) for j, r in zip(js, results) if isinstance(r, Exception))
    jj = [j for j, _ in keep]
    gaps = [r.gap for _, r in keep]
    return fit_power_law(jj, gaps, excluded=excluded,
                         extras={"scaled_gap": {j: g * j * j for j, g in zip(jj, gaps)},
                                 "saddles": dict(keep)})


def _gamma_star_job(args):
    kappa, j, p, bounds, n_gamma = args
    big_gamma, gap = min_gap_over_gamma(j, p, kappa, bounds, n_gamma)
    return big_gamma / (1.0 - big_gamma), gap


def quantum_width_scan(kappa_list, j, p=3, gamma_bounds=(0.4, 0.8), n_gamma=801, pmap=map) -> ScalingFit:
    """Fit gamma_0 - gamma* against kappa at fixed j.

    gamma* is the annealing ratio of the minimum gap at each kappa.
    ``extras`` records gamma*, gamma_0 and gamma_2 per sample.
    """
    ks = np.asarray(kappa_list, dtype=float)
    if ks.size < 2 or np.any(ks <= 0) or np.any(ks > 0.3):
        raise ValueError("kappa_list must hold at least two values in (0, 0.3]")
    out = list(pmap(_gamma_star_job, [(float(k), j, p, gamma_bounds, n_gamma) for k in ks]))
    g_star = np.array([o[0] for o in out])
    g0 = gamma_zero(ks)
    width = g0 - g_star
    if np.any(width <= 0):
        raise BracketError("gamma* not below gamma_0 at grid resolution", scanned=(ks, width))
    return fit_power_law(ks, width, extras={"gamma_star": g_star, "gamma_zero": g0,
                                             "gamma_second": gamma_second_order(ks)})


def saddle_width_scan(j_list, p=3, pmap=map) -> ScalingFit:
    """gamma_0(kappa_c) - gamma_c fitted against kappa_c, one sample per spin size."""
    results = _saddles(j_list, p, pmap)
    rows = [(r.kappa_c, r.gamma_c / (1.0 - r.gamma_c)) for r in results
            if not isinstance(r, Exception) and not r.clamped]
    ks = np.array([k for k, _ in rows])
    g_star = np.array([g for _, g in rows])
    width = gamma_zero(ks) - g_star
    return fit_power_law(ks, width, extras={"gamma_star": g_star, "j": list(j_list)})
