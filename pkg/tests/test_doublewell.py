import math

import numpy as np
import pytest
from scipy.linalg import expm

from annealgap import SymmetryError
from annealgap.doublewell import (
    build_well,
    gap_via_overlap_formula,
    ground_deficit,
    iso_gap_scan,
    migration_time,
    rayleigh_check,
    resonance_match,
    solve_well,
    stitched_ground_deficit,
)
from annealgap.spectrum import lowest_eigenpairs
from annealgap.spinspace import build_lmg_hamiltonian

C = 3.0 ** -0.25


def test_symmetric_example():
    w = build_well(2.0)
    assert w.seams == pytest.approx((-1.0, 1.0))
    assert w.barriers == pytest.approx((1.0, 1.0))
    assert w.potential(0.0) == 0.0


@pytest.mark.parametrize("args", [(2.0, 2.0, 1.0, 1.0), (1.5, 2.7, 0.8, 1.3), (C * 1.67, C * 1.67, 1.0, C)])
def test_seams_continuous_and_smooth(args):
    w = build_well(*args)
    for s in w.seams:
        lo, hi = np.nextafter(s, -np.inf), np.nextafter(s, np.inf)
        assert abs(w.potential(lo) - w.potential(hi)) <= 1e-12
        assert abs(w.derivative(lo) - w.derivative(hi)) <= 1e-12
    assert w.derivative(-args[0]) == pytest.approx(0.0, abs=1e-15)
    assert w.derivative(args[1]) == pytest.approx(0.0, abs=1e-15)


def test_negative_parameters_rejected():
    with pytest.raises(ValueError):
        build_well(-1.0)
    with pytest.raises(ValueError):
        build_well(1.0, beta1=0.0)


def test_single_parabola_limit():
    beta = 1.3
    spec = solve_well(build_well(0.0, beta1=beta), 3)
    np.testing.assert_allclose(spec.epsilon, (np.arange(3) + 0.5) / beta**2, rtol=1e-5)


def test_pairing_regime():
    spec = solve_well(build_well(4.0), 3)
    e = spec.energies
    assert (e[1] - e[0]) / (e[2] - e[0]) < 1e-3


def test_doublet_structure_tightens_with_separation():
    ratios = []
    for xi in (3.0, 3.5, 4.0):
        e = solve_well(build_well(xi), 3).energies
        ratios.append((e[1] - e[0]) / (e[2] - e[0]))
    assert ratios[0] < 1e-2
    assert ratios[0] > ratios[1] > ratios[2]


def test_ground_energy_at_barrier_height():
    spec = solve_well(build_well(1.07), 2)
    v0 = spec.well.barriers[0]
    assert spec.epsilon[0] == pytest.approx(v0, rel=0.02)


def test_parity_and_sign_conventions():
    spec = solve_well(build_well(2.5), 2)
    g, h = spec.grid, spec.spacing
    i0 = int(np.argmin(np.abs(g)))
    plus, minus = spec.eigenfunctions[:, 0], spec.eigenfunctions[:, 1]
    assert plus[i0] > 0 and abs(plus[i0 + 1] - plus[i0 - 1]) / (2 * h) < 1e-8
    assert abs(minus[i0]) < 1e-8 and (minus[i0 + 1] - minus[i0 - 1]) > 0
    assert spec.deficits[0] >= spec.deficits[1]
    assert np.all(spec.epsilon > 0)


def test_overlap_formula_examples():
    spec = solve_well(build_well(3.0), 2)
    assert gap_via_overlap_formula(spec) == pytest.approx(spec.gap_ratio, rel=1e-6)
    merged = solve_well(build_well(0.5), 2).gap_ratio
    assert 0.3 < merged < 1.5
    with pytest.raises(SymmetryError):
        gap_via_overlap_formula(solve_well(build_well(2.0, 2.2), 2))


def test_wide_wells_gap_inverse_square():
    scaled = [solve_well(build_well(2.0, beta1=b), 2).gap_ratio * b * b for b in (4.0, 8.0, 16.0)]
    assert scaled[0] < scaled[1] < scaled[2] < 1.0
    assert scaled[2] == pytest.approx(1.0, abs=0.1)


@pytest.mark.parametrize("xi, beta", [(1.5, 1.0), (2.5, 0.9), (2.0, 1.4)])
def test_stitched_deficit_matches_finite_differences(xi, beta):
    assert stitched_ground_deficit(xi, beta) == pytest.approx(ground_deficit(xi, beta), abs=1e-5)


def test_rayleigh_examples():
    assert rayleigh_check(build_well(3.0)).separated
    assert not rayleigh_check(build_well(0.5)).separated
    alpha = 1.67
    chk = rayleigh_check(build_well(alpha * C, alpha * C, 1.0, C))
    assert chk.margins == pytest.approx((alpha * C - 1.0, alpha - 1.0))


def test_resonance_trivial_and_monotone():
    assert resonance_match(1.2, 1.2, 2.0) == 2.0
    deficits = [ground_deficit(x, C, 2001) for x in np.linspace(0.5, 3.0, 11)]
    assert np.all(np.diff(deficits) > 0)
    xi2 = resonance_match(1.0, C, 2.0)
    assert ground_deficit(xi2, C) == pytest.approx(ground_deficit(2.0, 1.0), abs=1e-8)


@pytest.mark.parametrize("alpha", [1.0, 1.67, 2.5])
def test_resonance_reproduces_parameter_map(alpha):
    xi1 = alpha * C
    assert resonance_match(1.0, C, xi1) == pytest.approx(xi1, rel=1e-2)


def test_iso_gap_tail_and_exponential_regime():
    scan = iso_gap_scan([2.0], np.linspace(1.0, 6.0, 11), n=2001)
    beyond = scan.gap_ratio[0][scan.beta > scan.beta_star[0]]
    assert np.all(np.diff(beyond) < 0)

    xis = np.array([3.0, 3.5, 4.0, 4.5, 5.0])
    gaps = iso_gap_scan(xis, [1.0], refine=False).gap_ratio[:, 0]
    slope, icpt = np.polyfit(xis**2, np.log(gaps), 1)
    assert slope < 0
    assert np.max(np.abs(np.log(gaps) - (slope * xis**2 + icpt))) < 0.05


def test_gap_decreases_in_separation_beyond_locus():
    gaps = [solve_well(build_well(x, beta1=1.0), 2, 2001).gap_ratio for x in np.linspace(1.3, 4.0, 10)]
    assert np.all(np.diff(gaps) < 0)


def test_migration_time_examples():
    assert migration_time(1.0) == pytest.approx(2 * math.pi)
    assert migration_time(0.5) == pytest.approx(2 * migration_time(1.0))
    assert migration_time(0.0) == math.inf
    with pytest.raises(ValueError):
        migration_time(-1.0)


def test_lmg_two_level_rabi_period():
    j, gx = 30, 0.62
    h = build_lmg_hamiltonian(j, gx, 0.0)
    s = lowest_eigenpairs(h, 2)
    phi0, phi1 = s.eigenvectors[:, 0], s.eigenvectors[:, 1]
    left, right = (phi0 + phi1) / math.sqrt(2), (phi0 - phi1) / math.sqrt(2)
    dense = h.to_dense()
    coupling = right @ dense @ left
    two_level_period = 2 * math.pi / (2 * abs(coupling))
    tau = migration_time(s.delta01)
    assert tau == pytest.approx(two_level_period, rel=1e-8)
    psi = expm(-1j * dense * (tau / 2)) @ left
    assert abs(np.vdot(right, psi)) ** 2 == pytest.approx(1.0, abs=1e-6)
