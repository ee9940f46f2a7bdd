import itertools
import math
from functools import reduce

import numpy
import pytest
import scipy.linalg

import entanglement
import fermion_chain
import spin_chain


def _block_entropy(gamma, sites):
    return entanglement.von_neumann_entropy(
        entanglement.block_occupations(entanglement.block_correlation(gamma, sites))
    )


@pytest.mark.parametrize("sites", [range(0, 3), range(2, 6), range(1, 8), range(5, 6)])
def test_contiguous_blocks_match_dense_partial_traces(sites):
    spec = spin_chain.xy_spec(8, gamma=0.6, lam=1.3)
    gamma = fermion_chain.ground_correlation(spec)
    psi = spin_chain.ground_state(spec).full_vector()
    assert _block_entropy(gamma, sites) == pytest.approx(
        entanglement.dense_block_entropy(psi, sites, 8), abs=1e-8
    )


@pytest.mark.slow
@pytest.mark.parametrize("n_sites", [4, 6, 8, 10])
def test_every_contiguous_block_matches_on_a_grid(n_sites):
    for gamma_value, lam in itertools.product([0.3, 1.0], [0.6, 1.4]):
        spec = spin_chain.xy_spec(n_sites, gamma_value, lam)
        state = spin_chain.ground_state(spec)
        if state.degeneracy > 1:
            continue
        gamma = fermion_chain.ground_correlation(spec)
        psi = state.full_vector()
        for start in range(n_sites):
            for stop in range(start + 1, n_sites + 1):
                assert _block_entropy(gamma, range(start, stop)) == pytest.approx(
                    entanglement.dense_block_entropy(psi, range(start, stop), n_sites), abs=1e-8
                )


def test_profile_is_symmetric_on_a_ring():
    profile = entanglement.entropy_profile(spin_chain.ising_spec(20, 1.2))
    for ell in range(1, 20):
        assert profile[ell] == pytest.approx(profile[20 - ell], abs=1e-9)


def test_fermion_and_dense_profiles_agree():
    spec = spin_chain.ising_spec(10, 0.8)
    fermion = entanglement.entropy_profile(spec, method="fermion")
    dense = entanglement.entropy_profile(spec, method="dense")
    assert fermion.ells == dense.ells == list(range(1, 10))
    for ell in fermion.ells:
        assert fermion[ell] == pytest.approx(dense[ell], abs=1e-8)


def test_interacting_chain_uses_the_dense_path():
    profile = entanglement.entropy_profile(spin_chain.xyz_spec(6, delta=-0.5, lam=1.0), ells=[3])
    assert profile.ells == [3]
    with pytest.raises(fermion_chain.NotFermionizableError):
        entanglement.entropy_profile(spin_chain.xyz_spec(6, delta=-0.5, lam=1.0), method="fermion")


def test_profile_rejects_blocks_outside_the_chain():
    with pytest.raises(ValueError):
        entanglement.entropy_profile(spin_chain.ising_spec(6, 1.0), ells=[0, 3])
    with pytest.raises(ValueError):
        entanglement.entropy_profile(spin_chain.ising_spec(6, 1.0), method="exact")


def test_half_chain_entropy_on_the_circle_is_one_bit():
    profile = entanglement.entropy_profile(spin_chain.xy_spec(40, gamma=0.6, lam=0.8), ells=[20])
    assert profile[20] == pytest.approx(1.0, abs=0.02)


def test_whole_chain_is_pure_and_blocks_are_complementary():
    gamma = fermion_chain.ground_correlation(spin_chain.xy_spec(16, gamma=0.5, lam=0.9))
    whole = entanglement.block_occupations(gamma)
    numpy.testing.assert_allclose(numpy.minimum(whole.lambdas, 1 - whole.lambdas), 0, atol=1e-10)
    for ell in (1, 5, 8, 13):
        assert _block_entropy(gamma, range(ell)) == pytest.approx(
            _block_entropy(gamma, range(ell, 16)), abs=1e-9
        )


def test_product_state_limit():
    gamma = fermion_chain.ground_correlation(spin_chain.ising_spec(12, 100.0))
    lambdas = entanglement.block_occupations(entanglement.block_correlation(gamma, range(4))).lambdas
    assert numpy.max(numpy.minimum(lambdas, 1 - lambdas)) < 1e-3


def test_schmidt_truncation_at_criticality():
    gamma = fermion_chain.ground_correlation(spin_chain.ising_spec(100, 1.0))
    b = entanglement.block_occupations(entanglement.block_correlation(gamma, range(50)))
    full = entanglement.von_neumann_entropy(b)
    truncated = entanglement.schmidt_spectrum(b, 4)
    assert len(truncated.weights) == 4
    assert numpy.all(numpy.diff(truncated.weights) <= 0)
    errors = [full - entanglement.schmidt_spectrum(b, K).entropy for K in (4, 64, 4096)]
    assert all(error >= -1e-12 for error in errors)
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 0.05


def test_schmidt_spectrum_matches_brute_force():
    gamma = fermion_chain.ground_correlation(spin_chain.ising_spec(30, 1.0))
    b = entanglement.block_occupations(entanglement.block_correlation(gamma, range(8)))
    brute = []
    for occupation in itertools.product((0, 1), repeat=8):
        brute.append(numpy.prod([l if n else 1 - l for l, n in zip(b.lambdas, occupation)]))
    brute = numpy.sort(brute)[::-1]
    spectrum = entanglement.schmidt_spectrum(b, 20)
    numpy.testing.assert_allclose(spectrum.weights, brute[:20], rtol=1e-10, atol=1e-15)
    assert len(set(spectrum.patterns)) == 20
    assert spectrum.truncation_mass == pytest.approx(1 - brute[:20].sum(), abs=1e-12)

    full = entanglement.schmidt_spectrum(b, 2**8)
    assert full.truncation_mass == pytest.approx(0, abs=1e-12)
    assert full.entropy == pytest.approx(entanglement.von_neumann_entropy(b), abs=1e-9)


def test_renyi_entropies_decrease_with_the_order():
    gamma = fermion_chain.ground_correlation(spin_chain.xy_spec(30, gamma=0.5, lam=1.0))
    b = entanglement.block_occupations(entanglement.block_correlation(gamma, range(10)))
    values = [entanglement.renyi_entropy(b, alpha) for alpha in (0.5, 0.9999, 1, 1.0001, 2, 3, math.inf)]
    assert all(later <= earlier + 1e-12 for earlier, later in zip(values, values[1:]))
    assert values[1] == pytest.approx(values[2], abs=1e-3)
    assert values[3] == pytest.approx(values[2], abs=1e-3)
    assert values[-1] == pytest.approx(entanglement.single_copy(b))
    with pytest.raises(ValueError):
        entanglement.renyi_entropy(b, 0)


def test_binary_entropy():
    numpy.testing.assert_allclose(entanglement.binary_entropy([0.0, 0.5, 1.0]), [0.0, 1.0, 0.0])
    assert entanglement.binary_entropy(0.25) == pytest.approx(0.8112781244591328)


def test_unpaired_correlation_matrix_is_rejected():
    with pytest.raises(ValueError, match="paired"):
        entanglement.block_occupations(numpy.diag([0.1, 0.2]))
    with pytest.raises(ValueError):
        entanglement.BlockSpectrum(numpy.array([1.5]), 1)


def test_magnetization_and_correlator_match_dense():
    spec = spin_chain.xy_spec(8, gamma=0.7, lam=1.3)
    for site in (0, 3):
        assert entanglement.sigma_z_expectation(spec, site, "fermion") == pytest.approx(
            entanglement.sigma_z_expectation(spec, site, "dense"), abs=1e-9
        )
    for k, l in ((0, 1), (1, 4), (2, 7)):
        assert entanglement.zz_correlation(spec, k, l, "fermion") == pytest.approx(
            entanglement.zz_correlation(spec, k, l, "dense"), abs=1e-9
        )


def test_correlation_length_grows_towards_the_critical_field():
    lengths = [entanglement.correlation_length(spin_chain.ising_spec(100, lam)).xi for lam in (1.5, 1.3, 1.15)]
    assert lengths[0] < lengths[1] < lengths[2]


def test_concurrence_of_bell_and_product_states(bell_state):
    rho = numpy.outer(bell_state, bell_state.conj())
    assert entanglement.concurrence(rho) == pytest.approx(1.0, abs=1e-7)
    assert entanglement.eof_from_concurrence(1.0) == pytest.approx(1.0)

    product = numpy.zeros((4, 4))
    product[0, 0] = 1.0
    assert entanglement.concurrence(product) == pytest.approx(0.0, abs=1e-7)
    assert entanglement.eof_from_concurrence(0.0) == pytest.approx(0.0)

    with pytest.raises(ValueError):
        entanglement.concurrence(numpy.eye(2))
    with pytest.raises(ValueError):
        entanglement.eof_from_concurrence(1.5)


def test_mutual_information_of_a_bell_pair():
    psi = numpy.zeros(8)
    psi[0b000] = psi[0b110] = 1 / math.sqrt(2)
    assert entanglement.mutual_information(psi, [0], [1], 3) == pytest.approx(2.0)
    assert entanglement.mutual_information(psi, [0], [2], 3) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        entanglement.mutual_information(psi, [0, 1], [1], 3)


def test_best_first_schmidt_weights_match_the_dense_reduced_density_matrix():
    spec = spin_chain.ising_spec(8, 1.2)
    gamma = fermion_chain.ground_correlation(spec)
    b = entanglement.block_occupations(entanglement.block_correlation(gamma, range(4)))
    spectrum = entanglement.schmidt_spectrum(b, 16)
    psi = spin_chain.ground_state(spec).full_vector()
    dense = numpy.sort(scipy.linalg.eigvalsh(spin_chain.reduced_density_matrix(psi, range(4), 8)))[::-1]
    numpy.testing.assert_allclose(spectrum.weights, dense, atol=1e-10)
    assert spectrum.truncation_mass == pytest.approx(0.0, abs=1e-12)
    top = entanglement.schmidt_spectrum(b, 5)
    assert top.truncation_mass == pytest.approx(dense[5:].sum(), abs=1e-10)


@pytest.mark.parametrize("p, expected", [(0.7, 0.55), (0.8, 0.7), (0.3, 0.0)])
def test_werner_state_concurrence(p, expected):
    singlet = numpy.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2)
    rho = p * numpy.outer(singlet, singlet) + (1 - p) * numpy.eye(4) / 4
    assert entanglement.concurrence(rho) == pytest.approx(expected, abs=1e-7)


def test_ising_cat_state_carries_one_bit():
    n = 10
    plus = numpy.ones(2**n) / 2 ** (n / 2)
    minus = reduce(numpy.kron, [numpy.array([1.0, -1.0]) / math.sqrt(2)] * n)
    cat = (plus + minus) / numpy.linalg.norm(plus + minus)
    assert entanglement.dense_block_entropy(cat, range(n // 2), n) == pytest.approx(1.0, abs=1e-10)
    profile = entanglement.entropy_profile(spin_chain.ising_spec(n, 0.0), ells=[n // 2])
    assert profile[n // 2] == pytest.approx(1.0, abs=1e-8)
