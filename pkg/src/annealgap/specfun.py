"""Parabolic cylinder and Kummer functions for the piecewise-parabolic wells.

Series are summed in extended precision (mpmath floating point) because the
two Kummer branches of D_nu cancel strongly at large |x|.
"""
from __future__ import annotations

import math

import mpmath as mp

from .exceptions import ConvergenceError

__all__ = [
    "MATCHING_RADIUS",
    "special_parabolic_cylinder",
    "parabolic_cylinder_series",
    "parabolic_cylinder_asymptotic",
    "parabolic_cylinder_derivative",
    "kummer_m",
    "summit_ground_kummer",
    "summit_ground_kummer_derivative",
]

MATCHING_RADIUS = 6.0
NU_MAX = 50.0
X_MAX = 50.0
_MAX_TERMS = 20000


def kummer_m(a, b, z, dps=30):
    """1F1(a; b; z) by direct power series in mpmath arithmetic (complex allowed)."""
    with mp.workdps(dps):
        a, b, z = mp.mpmathify(a), mp.mpmathify(b), mp.mpmathify(z)
        term = mp.mpf(1)
        total = mp.mpf(1)
        eps = mp.mpf(10) ** (-dps + 3)
        for n in range(_MAX_TERMS):
            term *= (a + n) / (b + n) * z / (n + 1)
            total += term
            if abs(term) <= eps * abs(total) and n > abs(z):
                return total
        raise ConvergenceError("Kummer series did not converge", {"a": a, "b": b, "z": z})


def _check_envelope(nu, x):
    if abs(nu) > NU_MAX or abs(x) > X_MAX:
        raise ValueError(f"(nu, x) = ({nu}, {x}) outside the supported envelope |nu|, |x| <= 50")


def parabolic_cylinder_series(nu, x):
    """D_nu(x) from its two even/odd Kummer components."""
    _check_envelope(nu, x)
    # The branches are of size exp(x^2/4) x^(-nu-1) while D_nu may be as small as
    # exp(-x^2/4) x^nu, so cancellation can cost (x^2/2 + |2nu+1| ln|x|)/ln 10 digits.
    lost = x * x / 2 + abs(2 * nu + 1) * math.log1p(abs(x))
    dps = 30 + int(lost / math.log(10))
    with mp.workdps(dps):
        nu_m, x_m = mp.mpf(nu), mp.mpf(x)
        y = x_m * x_m / 2
        even = mp.sqrt(mp.pi) * mp.rgamma((1 - nu_m) / 2) * kummer_m(-nu_m / 2, mp.mpf(1) / 2, y, dps)
        odd = mp.sqrt(2 * mp.pi) * x_m * mp.rgamma(-nu_m / 2) * kummer_m((1 - nu_m) / 2, mp.mpf(3) / 2, y, dps)
        value = mp.power(2, nu_m / 2) * mp.exp(-y / 2) * (even - odd)
        return float(value)


def parabolic_cylinder_asymptotic(nu, x, rtol=1e-12):
    """Large positive x expansion; returns None when it cannot reach ``rtol``."""
    if x <= 0:
        return None
    total, term = 1.0, 1.0
    for s in range(1, 200):
        prev = abs(term)
        term *= -(nu - 2 * s + 2) * (nu - 2 * s + 1) / (2.0 * s * x * x)
        if abs(term) > prev:  # divergent tail starts; stop at the smallest term
            return None
        total += term
        if abs(term) <= rtol * abs(total):
            return x**nu * math.exp(-x * x / 4) * total
    return None


def special_parabolic_cylinder(nu, x):
    """Weber function D_nu(x).

    The power series is used for |x| <= MATCHING_RADIUS and the asymptotic
    expansion beyond it (positive x) whenever it converges to 1e-12; otherwise
    the extended-precision series is used throughout.
    """
    _check_envelope(nu, x)
    if x > MATCHING_RADIUS:
        value = parabolic_cylinder_asymptotic(nu, x)
        if value is not None:
            return value
    return parabolic_cylinder_series(nu, x)


def parabolic_cylinder_derivative(nu, x):
    """d/dx D_nu(x) = (x/2) D_nu(x) - D_{nu+1}(x)."""
    return 0.5 * x * special_parabolic_cylinder(nu, x) - special_parabolic_cylinder(nu + 1, x)


def _summit_parts(delta_plus, xi, dps=30):
    with mp.workdps(dps):
        a = (1 - 2j * mp.mpf(delta_plus)) / 4
        z = 1j * mp.mpf(xi) ** 2
        phase = mp.exp(-z / 2)
        m0 = kummer_m(a, mp.mpf(1) / 2, z, dps)
        m1 = kummer_m(a + 1, mp.mpf(3) / 2, z, dps)
        return a, z, phase, m0, m1


def summit_ground_kummer(delta_plus, xi):
    """Even solution of phi'' + (xi^2 - 2 delta) phi = 0 with phi(0) = 1.

    Evaluated as Re[exp(-i xi^2/2) 1F1((1 - 2i delta)/4; 1/2; i xi^2)].
    """
    _, _, phase, m0, _ = _summit_parts(delta_plus, xi)
    return float(mp.re(phase * m0))


def summit_ground_kummer_derivative(delta_plus, xi):
    a, z, phase, m0, m1 = _summit_parts(delta_plus, xi)
    with mp.workdps(30):
        x = mp.mpf(xi)
        # d/dxi [e^{-i xi^2/2} M(a,1/2,i xi^2)] = e^{..} [-i xi M + 2 i xi (a/(1/2)) M(a+1,3/2,.)]
        d = phase * (-1j * x * m0 + 2j * x * 2 * a * m1)
        return float(mp.re(d))
