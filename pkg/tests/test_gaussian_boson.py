import math

import numpy
import pytest

import criticality
import entanglement
import gaussian_boson


def _nearest_eof(n_sites, kappa, distance=1):
    state = gaussian_boson.kg_ground_state(gaussian_boson.KGSpec(n_sites, kappa))
    return gaussian_boson.symmetric_gaussian_eof(gaussian_boson.two_mode_matrix(state, 0, distance))


def test_ground_state_is_pure():
    state = gaussian_boson.kg_ground_state(gaussian_boson.KGSpec(10, 0.5))
    numpy.testing.assert_allclose(gaussian_boson.symplectic_eigenvalues(state.covariance()), 1.0, atol=1e-8)
    assert gaussian_boson.gaussian_block_entropy(state, range(10)) == pytest.approx(0.0, abs=1e-6)


def test_block_paths_agree():
    state = gaussian_boson.kg_ground_state(gaussian_boson.KGSpec(16, 0.2))
    sites = [2, 3, 4, 5, 9]
    index = numpy.ix_(sites, sites)
    covariance = 2 * numpy.block([[state.Q[index], state.S[index]], [state.S[index].T, state.P[index]]])
    numpy.testing.assert_allclose(
        gaussian_boson.block_symplectic_eigenvalues(state, sites),
        gaussian_boson.symplectic_eigenvalues(covariance),
        rtol=1e-9,
    )


def test_complementary_blocks_have_equal_entropy():
    state = gaussian_boson.kg_ground_state(gaussian_boson.KGSpec(12, 0.3))
    assert gaussian_boson.gaussian_block_entropy(state, range(4)) == pytest.approx(
        gaussian_boson.gaussian_block_entropy(state, range(4, 12)), abs=1e-8
    )


def test_single_mode_entropy_matches_zeta():
    for nu in (1.0, 1.5, 3.0):
        a = math.acosh(math.sqrt((nu + 1) / 2))
        assert gaussian_boson.single_mode_entropy(nu) == pytest.approx(gaussian_boson.zeta(a))


def test_massless_limit_has_unit_charge():
    state = gaussian_boson.kg_ground_state(gaussian_boson.KGSpec(30, 1e-3))
    values = {ell: gaussian_boson.gaussian_block_entropy(state, range(ell)) for ell in range(1, 30)}
    estimate = criticality.estimate_central_charge(entanglement.EntropyProfile(30, values))
    assert estimate.c_est == pytest.approx(1.0, abs=0.1)


def test_nearest_neighbour_entanglement_saturates():
    assert _nearest_eof(30, 1e-3) == pytest.approx(0.48, abs=0.03)


def test_third_neighbours_are_entangled_only_on_the_smallest_ring():
    assert _nearest_eof(6, 1e-3, distance=3) > 0
    for n_sites in (10, 20, 30):
        assert _nearest_eof(n_sites, 1e-3, distance=3) == 0.0


def test_entanglement_fades_with_the_mass():
    values = [_nearest_eof(30, kappa) for kappa in (0.1, 0.5, 1.0, 2.0, 4.0)]
    assert all(later < earlier for earlier, later in zip(values, values[1:]))
    assert values[-1] < 0.05


def test_standard_form_limits():
    vacuum = gaussian_boson.TwoModeStandardForm(1.0, 1.0, 0.0, 0.0)
    assert gaussian_boson.symmetric_gaussian_eof(vacuum) == 0.0
    with pytest.raises(ValueError, match="uncertainty"):
        gaussian_boson.symmetric_gaussian_eof(gaussian_boson.TwoModeStandardForm(1.0, 1.0, 0.5, 0.5))
    with pytest.raises(ValueError, match="symmetric"):
        gaussian_boson.symmetric_gaussian_eof(gaussian_boson.TwoModeStandardForm(1.0, 2.0, 0.0, 0.0))


def test_standard_form_of_the_ground_state():
    state = gaussian_boson.kg_ground_state(gaussian_boson.KGSpec(20, 0.4))
    form = gaussian_boson.two_mode_matrix(state, 3, 4)
    assert form.n_a == form.n_b >= 1
    assert form.k_q >= abs(form.k_p)
    with pytest.raises(ValueError):
        gaussian_boson.two_mode_matrix(state, 3, 3)


def test_position_kernel_of_a_displaced_oscillator():
    omega, q0 = 1.7, 0.4
    moments = gaussian_boson.position_to_moments([[omega]], [[0.0]], [omega * q0])
    assert moments.Q[0, 0] == pytest.approx(1 / (2 * omega))
    assert moments.P[0, 0] == pytest.approx(omega / 2)
    assert moments.mean_q[0] == pytest.approx(q0)
    assert moments.mean_p[0] == pytest.approx(0.0)
    with pytest.raises(ValueError):
        gaussian_boson.position_to_moments([[-1.0]], [[0.0]], [0.0])


def test_spec_validation():
    with pytest.raises(ValueError):
        gaussian_boson.KGSpec(10, 0.0)
    with pytest.raises(ValueError):
        gaussian_boson.KGSpec(10, 1.0, impurity_site=10)
    with pytest.raises(ValueError):
        gaussian_boson.impurity_field_evolution(gaussian_boson.KGSpec(10, 1.0), [0.0])


def test_impurity_field_starts_at_zero():
    spec = gaussian_boson.KGSpec(12, 0.3, impurity_site=4, impurity_strength=1.0)
    evolution = gaussian_boson.impurity_field_evolution(spec, [0.0, 1.0])
    assert evolution.phi.shape == evolution.pi.shape == (2, 12)
    numpy.testing.assert_allclose(evolution.phi[0], 0.0, atol=1e-12)
    numpy.testing.assert_allclose(evolution.pi[0], 0.0, atol=1e-12)


def test_impurity_field_oscillates_around_the_constant_term():
    kappa = 0.02
    spec = gaussian_boson.KGSpec(6, kappa, impurity_site=0, impurity_strength=1.0)
    period = 2 * math.pi / kappa
    times = numpy.linspace(0.0, 10 * period, 40000, endpoint=False)
    phi = gaussian_boson.impurity_field_evolution(spec, times, sites=[0]).phi[:, 0]
    assert phi.mean() == pytest.approx(gaussian_boson.constant_term_sum(spec), rel=0.01)
    assert gaussian_boson.oscillation_period(times, phi) == pytest.approx(period, rel=0.05)


def test_constant_term_closed_form():
    spec = gaussian_boson.KGSpec(2000, 0.5, impurity_site=0, impurity_strength=1.0)
    assert gaussian_boson.constant_term_sum(spec) == pytest.approx(
        gaussian_boson.constant_term_closed_form(0.5), rel=1e-8
    )


def test_oscillation_period_needs_two_peaks():
    times = numpy.linspace(0.0, 1.0, 50)
    with pytest.raises(ValueError):
        gaussian_boson.oscillation_period(times, numpy.sin(numpy.pi * times))
