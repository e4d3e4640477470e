import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annealgap import AnnealGapError, BracketError
from annealgap.catalysis import (
    _v,
    ferro_minimum,
    fit_exponential,
    fit_gap_scaling,
    fit_kappa_c,
    fit_power_law,
    gamma_classical,
    gamma_second_order,
    gamma_zero,
    quantum_width_scan,
    rayleigh_alpha_optimum,
    small_kappa_state,
)
from conftest import cached_saddle


def cached_map(fn, jobs):
    return [cached_saddle(*job) for job in jobs]


def test_gamma_zero_examples():
    assert gamma_zero(1.0) == pytest.approx(1.5, rel=1e-14)
    k = 0.01
    assert abs(gamma_zero(k) - (2 * (1 - k) + 2.25 * k * k)) < 10 * k**3
    assert gamma_zero(1e-5) == pytest.approx(2.0, abs=1e-4)
    with pytest.raises(ValueError):
        gamma_zero(0.0)


def test_gamma_second_order_examples():
    assert gamma_second_order(0.0) == 2.0
    assert gamma_second_order(1.0) == 0.0
    assert gamma_second_order(0.5) == 1.0


def test_gamma_classical_at_kappa_one():
    g = gamma_classical(1.0)
    assert g / (1 + g) == pytest.approx(0.565, abs=0.01)


def test_gamma_classical_small_kappa_sweet_spot():
    k = 0.02
    x = 2 * math.sqrt(gamma_zero(k) - gamma_classical(k)) / k
    assert x == pytest.approx(1.07, abs=0.01)


def test_equal_depth_parameter_envelope():
    xs = {k: 2 * math.sqrt(gamma_zero(k) - gamma_classical(k)) / k for k in (0.005, 0.05, 0.1, 0.2, 0.3)}
    assert xs[0.005] == pytest.approx(1.0, abs=5e-3)  # V0 = V00 at x = 1 to leading order
    assert max(xs.values()) == pytest.approx(1.07, abs=0.01)


@pytest.mark.parametrize("kappa", [0.02, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0])
def test_boundary_ordering(kappa):
    assert gamma_second_order(kappa) < gamma_classical(kappa) < gamma_zero(kappa)


def test_ferro_minimum_examples():
    k = 0.1
    g0 = gamma_zero(k)
    birth = ferro_minimum(g0 * (1 - 1e-12), k)
    assert birth.z1 == pytest.approx(birth.z_star, abs=1e-5)

    ext = ferro_minimum(g0 - (k / 2) ** 2, k)
    assert ext.z1 == pytest.approx(0.2, abs=2 * k * k)
    assert ext.z_star == pytest.approx(0.1, abs=2 * k * k)

    h = 1e-6
    for z in (ext.z1, ext.z_star):
        slope = (_v(z + h, g0 - (k / 2) ** 2, k) - _v(z - h, g0 - (k / 2) ** 2, k)) / (2 * h)
        assert abs(slope) < 1e-10

    with pytest.raises(BracketError):
        ferro_minimum(g0 * 1.01, k)


def test_small_kappa_example_and_envelope():
    assert small_kappa_state(0.1, 1.0).V0 == pytest.approx(1.25e-5)
    with pytest.raises(ValueError):
        small_kappa_state(0.3, 1.0)
    with pytest.raises(ValueError):
        small_kappa_state(0.1, 1.2)


@given(st.floats(1e-3, 0.2), st.floats(0.05, 1.07))
@settings(max_examples=50, deadline=None)
def test_mass_frequency_product(kappa, x):
    s = small_kappa_state(kappa, x)
    assert s.omega0 / s.inv_m0 == pytest.approx(1.0, rel=1e-15)
    assert s.V0 >= 0 and s.V00 >= 0
    assert min(s.omega0, s.omega1, s.omega_star) > 0


def test_rayleigh_optimum():
    opt = rayleigh_alpha_optimum()
    assert opt.alpha == pytest.approx(1.67, abs=0.05)
    assert opt.gap_coefficient == pytest.approx(math.sqrt(3) / 2, rel=0.15)


def test_rayleigh_curve_is_unimodal():
    opt = rayleigh_alpha_optimum()
    signs = np.sign(np.diff(opt.values))
    assert np.count_nonzero(np.diff(signs)) == 1


def test_fit_helpers_recover_known_laws():
    x = np.array([10.0, 20.0, 40.0, 80.0])
    p = fit_power_law(x, 3.0 * x**-1.5)
    assert p.exponent == pytest.approx(-1.5) and p.coefficient == pytest.approx(3.0)
    e = fit_exponential(x, 2.0 * np.exp(-0.2 * x))
    assert e.exponent == pytest.approx(-0.2) and e.predict(5.0) == pytest.approx(2.0 * math.exp(-1.0))
    with pytest.raises(ValueError):
        fit_power_law([1.0], [1.0])


def test_fit_kappa_c_excludes_clamped_sizes():
    fit = fit_kappa_c([10, 17, 20, 25, 30], pmap=cached_map)
    assert [j for j, _ in fit.excluded] == [10, 17]
    assert fit.window == (20.0, 30.0)
    with pytest.raises(AnnealGapError):
        fit_kappa_c([5, 10], pmap=cached_map)


def test_kappa_c_non_increasing_beyond_crossover():
    ks = [cached_saddle(j).kappa_c for j in (18, 19, 20, 25, 30, 40)]
    assert all(a >= b for a, b in zip(ks, ks[1:]))


def test_catalysed_gap_exponent():
    fit = fit_gap_scaling([40, 60, 80, 100, 150, 200], pmap=cached_map)
    assert fit.exponent == pytest.approx(-2.0, abs=0.15)
    assert set(fit.extras["scaled_gap"]) == {40, 60, 80, 100, 150, 200}


def test_uncatalysed_and_lmg_fit_kinds():
    unc = fit_gap_scaling([20, 30, 40], catalysed=False)
    assert unc.kind == "exponential" and unc.exponent < 0
    lmg = fit_gap_scaling([20, 40, 80], model="lmg")
    assert lmg.kind == "power"
    with pytest.raises(ValueError):
        fit_gap_scaling([20, 30], model="ising")


def test_quantum_width_sandwich():
    ks = np.linspace(0.05, 0.3, 6)
    fit = quantum_width_scan(ks, 100)
    g_star = fit.extras["gamma_star"]
    assert np.all(fit.extras["gamma_second"] <= g_star)
    assert np.all(g_star <= fit.extras["gamma_zero"])
    with pytest.raises(ValueError):
        quantum_width_scan([0.1, 0.4], 100)
