import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from annealgap import NegativeMassError
from annealgap.continuum import (
    ContinuumProblem,
    continuum_gap,
    continuum_vs_spin_report,
    discretize,
    inverse_mass,
    lmg_barrier,
    mass_profile,
    negative_mass_gamma,
    potential_v,
    potential_v_lmg,
    solve_continuum,
)
from annealgap.spectrum import min_gap_over_gamma, pspin_gap
from annealgap.spinspace import ControlPoint, SpinParams, mean_field_energy


def params_at(ratio, kappa, j=10, p=3):
    return SpinParams(j, p, ControlPoint(ratio / (1 + ratio), kappa))


def test_potential_examples():
    prm = params_at(0.8, 0.3)
    assert potential_v(0.0, prm) == pytest.approx(-1 + 0.7 / 0.8)
    assert potential_v(1.0, prm) == pytest.approx(-0.3 / 0.8)
    assert potential_v(0.5, params_at(2.0, 1.0)) == pytest.approx(-math.sqrt(0.75) - 0.0625)
    with pytest.raises(ValueError):
        potential_v(0.0, SpinParams(10, 3, ControlPoint(1.0, 0.5)))
    with pytest.raises(ValueError):
        potential_v(1.5, prm)


def test_lmg_potential_examples():
    assert potential_v_lmg(0.0, 0.4, 0.0) == pytest.approx(-1.0)
    assert lmg_barrier(2 / 3) == pytest.approx(0.0, abs=1e-15)
    assert lmg_barrier(0.5) == pytest.approx(0.25)


def test_inverse_mass_examples():
    prm = params_at(0.7, 0.2)
    np.testing.assert_allclose(inverse_mass(np.array([-1.0, 1.0]), prm), 0.0, atol=1e-15)
    z = np.linspace(-0.9, 0.9, 7)
    np.testing.assert_allclose(inverse_mass(z, params_at(0.7, 1.0)), np.sqrt(1 - z * z))
    k = 0.4
    assert inverse_mass(0.0, params_at(negative_mass_gamma(k), k)) == pytest.approx(0.0, abs=1e-14)


def test_mass_profile_crossings():
    k, ratio = 0.4, 0.6
    prof = mass_profile(params_at(ratio, k))
    zc = math.sqrt(1 - (ratio / (2 * (1 - k))) ** 2)
    assert prof.crossings == pytest.approx((-zc, zc))
    assert mass_profile(params_at(negative_mass_gamma(k), k)).crossings == (0.0,)
    assert mass_profile(params_at(2.0, k)).crossings == ()


def test_negative_mass_rejected_with_crossings():
    prm = params_at(0.6, 0.4, j=20)
    with pytest.raises(NegativeMassError) as info:
        discretize(ContinuumProblem.for_spin(prm))
    zc = math.sqrt(1 - (0.6 / 1.2) ** 2)
    assert info.value.crossings == pytest.approx([-zc, zc], abs=2e-3)


def test_particle_in_a_box():
    prob = ContinuumProblem.from_functions(lambda z: 0 * z, lambda z: 1 + 0 * z, 1.0, n=2001)
    e0 = solve_continuum(prob, 1).eigenvalues[0]
    assert e0 == pytest.approx(math.pi**2 / 8, rel=1e-5)


def test_harmonic_oscillator_limit():
    hbar = 0.01
    prob = ContinuumProblem.from_functions(lambda z: z * z / 2, lambda z: 1 + 0 * z, hbar, -0.6, 0.6, 4001)
    w = solve_continuum(prob, 4).eigenvalues
    np.testing.assert_allclose(w, (np.arange(4) + 0.5) * hbar, atol=1e-6)


def test_operator_symmetric_and_sturm_nodes():
    prob = ContinuumProblem.for_spin(params_at(1.3, 0.6, j=20))
    dense = discretize(prob).to_dense()
    np.testing.assert_array_equal(dense, dense.T)
    s = solve_continuum(prob, 2)
    ground, first = s.eigenvectors[:, 0], s.eigenvectors[:, 1]
    big = lambda v: v[np.abs(v) > 1e-8 * np.abs(v).max()]
    assert np.all(big(ground) > 0)
    assert np.count_nonzero(np.diff(np.sign(big(first)))) == 1


def test_grid_refinement_order():
    def gap(n):
        prob = ContinuumProblem.from_functions(lambda z: 2 * z**4 - z * z, lambda z: 1 + z * z / 4, 0.2, n=n)
        return solve_continuum(prob, 2).delta01

    g1, g2, g3 = gap(201), gap(401), gap(801)
    order = math.log2(abs(g1 - g2) / abs(g2 - g3))
    assert order >= 1.9


@given(st.floats(-math.pi / 2, math.pi / 2), st.floats(0.05, 0.95), st.floats(0.0, 1.0))
@settings(max_examples=60, deadline=None)
def test_potential_is_mean_field_energy(theta, big_gamma, kappa):
    prm = SpinParams(10, 3, ControlPoint(big_gamma, kappa))
    lhs = potential_v(math.sin(theta), prm) * big_gamma
    assert lhs == pytest.approx(mean_field_energy(theta, prm), abs=1e-14)


def test_semiclassical_ground_energy():
    errs = []
    for hbar in (0.02, 0.01, 0.005):
        prob = ContinuumProblem.from_functions(lambda z: (z - 0.2) ** 2 - 0.3, lambda z: 1 + 0 * z, hbar, n=2001)
        vmin = prob.potential.min()
        errs.append(solve_continuum(prob, 1).eigenvalues[0] - vmin)
    assert all(e > 0 for e in errs)
    assert errs[2] / errs[0] == pytest.approx(0.25, rel=0.05)  # linear in hbar


@pytest.mark.parametrize("kappa", [0.3, 0.5, 0.7, 1.0])
def test_ridge_minimum_agrees_with_spin_gap(kappa):
    # The continuum ridge sits a few 1e-3 lower in Gamma, so compare the minima
    # over Gamma rather than the two gaps at one shared exponentially sensitive point.
    g, spin = min_gap_over_gamma(40, 3, kappa)
    res = minimize_scalar(lambda x: continuum_gap(SpinParams(40, 3, ControlPoint(x, kappa))),
                          bounds=(g - 0.03, g + 0.03), method="bounded", options={"xatol": 1e-7})
    assert res.fun == pytest.approx(spin, rel=0.10)


def test_report_flags():
    rows = continuum_vs_spin_report(10, 3, [0.0, 0.5, 1.0], [0.02, 0.3, 1.0])
    by = {(r.gamma_field, r.kappa): r for r in rows}
    for k in (0.02, 0.3, 1.0):
        assert by[(1.0, k)].status == "gamma_one"
        assert by[(1.0, k)].spin_gap == pytest.approx(0.1, rel=1e-12)
        assert by[(0.0, k)].status == "gamma_zero"
    assert by[(0.5, 0.3)].status == "negative_mass"
    assert by[(0.5, 1.0)].status == "ok"
    assert by[(0.5, 1.0)].spin_gap == pytest.approx(pspin_gap(10, 3, 0.5, 1.0))
