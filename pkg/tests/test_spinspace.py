import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annealgap.spinspace import (
    BandedSymmetricMatrix,
    ControlPoint,
    SpinParams,
    build_jx,
    build_jz,
    build_lmg_hamiltonian,
    build_pspin_hamiltonian,
    coherent_state,
    expectation,
    mean_field_energy,
    spin_vector_stats,
    two_j_of,
)


def pspin(j, gamma, kappa, p=3):
    return build_pspin_hamiltonian(SpinParams(j, p, ControlPoint(gamma, kappa)))


@pytest.mark.parametrize("j, expected", [(0.5, [-0.5, 0.5]), (1, [-1, 0, 1]), (1.5, [-1.5, -0.5, 0.5, 1.5])])
def test_jz_diagonal(j, expected):
    jz = build_jz(j)
    assert jz.bandwidth == 0
    np.testing.assert_array_equal(jz.diagonal(), expected)


@pytest.mark.parametrize("bad", [0.3, -1, 2.25])
def test_rejects_non_half_integer(bad):
    with pytest.raises(ValueError):
        two_j_of(bad)


def test_jx_small_cases():
    np.testing.assert_allclose(build_jx(0.5).to_dense(), [[0, 0.5], [0.5, 0]])
    r = 1 / math.sqrt(2)
    np.testing.assert_allclose(build_jx(1).to_dense(), [[0, r, 0], [r, 0, r], [0, r, 0]])


@pytest.mark.parametrize("j", [0.5, 3, 7.5, 20])
def test_jx_extreme_eigenvalues(j):
    w = np.linalg.eigvalsh(build_jx(j).to_dense())
    assert w[0] == pytest.approx(-j, abs=1e-12)
    assert w[-1] == pytest.approx(j, abs=1e-12)


def test_pspin_pure_transverse_field():
    w = np.linalg.eigvalsh(pspin(1, 1.0, 1.0).to_dense())
    np.testing.assert_allclose(w, [-1, 0, 1], atol=1e-14)


def test_pspin_classical_limit():
    h = pspin(2, 0.0, 1.0).to_dense()
    np.testing.assert_allclose(h, np.diag(np.diag(h)))
    w = np.sort(np.diag(h))
    assert w[0] == pytest.approx(-1.0)
    assert np.argmin(np.diag(h)) == 4  # m = +j
    assert w[1] - w[0] == pytest.approx(7 / 8)


def test_pspin_hand_assembled_j1():
    a = 1 / math.sqrt(2)
    expected = np.array([
        [0.375, -0.5 * a, 0.125],
        [-0.5 * a, 0.25, -0.5 * a],
        [0.125, -0.5 * a, -0.125],
    ])
    np.testing.assert_allclose(pspin(1, 0.5, 0.5).to_dense(), expected, atol=1e-15)


def test_pspin_bandwidth_and_symmetry():
    h = pspin(6, 0.4, 0.3)
    assert h.bandwidth == 2
    dense = h.to_dense()
    np.testing.assert_array_equal(dense, dense.T)
    assert BandedSymmetricMatrix.from_dense(dense).bandwidth <= 2


def test_invalid_controls_and_power():
    with pytest.raises(ValueError):
        ControlPoint(1.2, 0.5)
    with pytest.raises(ValueError):
        ControlPoint(0.5, -0.1)
    with pytest.raises(ValueError):
        SpinParams(3, 1)
    with pytest.raises(ValueError):
        ControlPoint(1.0, 0.5).ratio


def test_lmg_examples():
    w = np.linalg.eigvalsh(build_lmg_hamiltonian(2, 1.0, 0.0).to_dense())
    np.testing.assert_allclose(w, np.sort(-np.arange(-2, 3) / 2), atol=1e-14)
    w = np.linalg.eigvalsh(build_lmg_hamiltonian(2, 0.0, 0.0).to_dense())
    assert w[1] - w[0] == pytest.approx(0.0, abs=1e-14)
    h = build_lmg_hamiltonian(2, 0.0, 0.25).to_dense()
    assert np.argmin(np.diag(h)) == 4 and h[4, 4] == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        build_lmg_hamiltonian(2, 1.5, 0.0)
    with pytest.raises(ValueError):
        build_lmg_hamiltonian(2, 0.5, -1.5)


@pytest.mark.parametrize("j", [1, 2.5, 10])
def test_lmg_reflection_symmetry(j):
    h = build_lmg_hamiltonian(j, 0.37, 0.0)
    assert np.max(np.abs(h.reflect().to_dense() - h.to_dense())) <= 1e-14


@given(st.integers(1, 30), st.integers(0, 3), st.integers(0, 2**31 - 1))
@settings(max_examples=40, deadline=None)
def test_square_matches_dense(n, b, seed):
    rng = np.random.default_rng(seed)
    b = min(b, n - 1)
    bands = rng.standard_normal((b + 1, n))
    for k in range(1, b + 1):
        bands[k, n - k:] = 0.0
    m = BandedSymmetricMatrix(bands)
    d = m.to_dense()
    np.testing.assert_allclose(m.square().to_dense(), d @ d, atol=1e-12)
    v = rng.standard_normal(n)
    np.testing.assert_allclose(m.matvec(v), d @ v, atol=1e-12)


def test_mean_field_examples():
    params = SpinParams(10, 3, ControlPoint(1.0, 1.0))
    assert mean_field_energy(0.0, params) == pytest.approx(-1.0)
    params = SpinParams(10, 3, ControlPoint(0.0, 1.0))
    assert mean_field_energy(np.pi / 2, params) == pytest.approx(-1.0)


def test_coherent_state_energy_approaches_mean_field():
    theta = 0.6
    params = lambda j: SpinParams(j, 3, ControlPoint(0.55, 0.4))
    scaled = []
    for j in (10, 20, 40, 80):
        psi = coherent_state(theta, j)
        diff = abs(expectation(build_pspin_hamiltonian(params(j)), psi) - mean_field_energy(theta, params(j)))
        scaled.append(diff * j)
    # O(1/j): j * difference settles to a constant
    assert max(scaled) / min(scaled) < 1.3


def test_spin_stats_examples():
    j = 9
    top = np.zeros(19)
    top[-1] = 1.0
    s = spin_vector_stats(top, j)
    assert s.r == pytest.approx(1.0)
    assert s.theta == pytest.approx(np.pi / 2)
    assert s.delta_r == pytest.approx(1 / math.sqrt(j))

    ghz = np.zeros(5)
    ghz[0] = ghz[-1] = 1 / math.sqrt(2)
    assert spin_vector_stats(ghz, 2).r == pytest.approx(0.0, abs=1e-14)

    sx = spin_vector_stats(coherent_state(0.0, 5), 5)
    assert sx.r == pytest.approx(1.0) and sx.theta == pytest.approx(0.0, abs=1e-12)

    with pytest.raises(ValueError):
        spin_vector_stats(2 * top, j)
