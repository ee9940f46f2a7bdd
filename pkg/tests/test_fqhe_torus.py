import math

import numpy
import pytest

import fqhe_torus


def test_occupation_basis_is_lexicographic():
    basis = fqhe_torus.OccupationBasis.build(2, 4)
    assert [basis.occupations(a) for a in range(basis.dimension)] == [
        (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)
    ]


def test_momentum_sectors_partition_the_basis():
    sectors = fqhe_torus.momentum_sectors(3, 9)
    assert sum(basis.dimension for basis in sectors.values()) == math.comb(9, 3) == 84
    for K, basis in sectors.items():
        assert all(sum(basis.occupations(a)) % 9 == K for a in range(basis.dimension))


def test_hamiltonian_is_hermitian_and_conserves_momentum():
    spec = fqhe_torus.FQHESpec(3, 6, aspect_ratio=0.7)
    h = fqhe_torus.build_fqhe_hamiltonian(spec).toarray()
    numpy.testing.assert_allclose(h, h.conj().T, atol=1e-12)
    basis = fqhe_torus.OccupationBasis.build(3, 6)
    momenta = numpy.array([sum(basis.occupations(a)) % 6 for a in range(basis.dimension)])
    rows, cols = numpy.nonzero(numpy.abs(h) > 1e-14)
    assert numpy.all(momenta[rows] == momenta[cols])


def test_interaction_tensor_matches_direct_elements():
    spec = fqhe_torus.FQHESpec(2, 5, aspect_ratio=0.8)
    tensor = fqhe_torus.InteractionTensor.build(spec)
    for j1, j2, j3, j4 in [(0, 1, 2, 4), (3, 3, 1, 0), (4, 2, 3, 3)]:
        direct = fqhe_torus.matrix_element(j1 + 1, j2 + 1, j3 + 1, j4 + 1, spec)
        assert tensor.values[j1, j2, j3, j4] == pytest.approx(direct, abs=1e-12)
    assert fqhe_torus.matrix_element(1, 1, 1, 2, spec) == 0


def test_matrix_element_cutoff_check():
    spec = fqhe_torus.FQHESpec(2, 4, aspect_ratio=1.0, q_cutoff=1)
    with pytest.raises(ValueError, match="q_cutoff"):
        fqhe_torus.matrix_element(1, 2, 1, 2, spec, check_convergence=True)
    with pytest.raises(ValueError):
        fqhe_torus.matrix_element(0, 1, 1, 0, spec)


@pytest.mark.parametrize("aspect_ratio", [0.05, 0.3, 1.0])
def test_default_cutoff_converges(aspect_ratio):
    tensor = fqhe_torus.InteractionTensor.build(fqhe_torus.FQHESpec(3, 9, aspect_ratio))
    assert len(tensor.values) == 9 ** 3


def test_entropy_refuses_an_unconverged_cutoff():
    with pytest.raises(ValueError, match="q_cutoff"):
        fqhe_torus.fqhe_entropy(fqhe_torus.FQHESpec(2, 4, aspect_ratio=1.0, q_cutoff=1))
    results = fqhe_torus.fqhe_entropy_scan(fqhe_torus.FQHESpec(2, 4, q_cutoff=1), 1, [1.0])
    assert "q_cutoff" in results[0].error


def test_partial_trace_of_a_diagonal_matrix():
    rho = numpy.diag([0.5, 0.3, 0.2])
    reduced = fqhe_torus.identical_particle_partial_trace(rho, 2, 3, 1)
    numpy.testing.assert_allclose(reduced, numpy.diag([0.4, 0.35, 0.25]), atol=1e-15)


@pytest.mark.parametrize("fermionic_signs", [False, True])
def test_partial_trace_keeps_coherences(fermionic_signs):
    psi = numpy.array([1.0, 1.0, 0.0]) / math.sqrt(2)
    reduced = fqhe_torus.identical_particle_partial_trace(numpy.outer(psi, psi), 2, 3, 1, fermionic_signs)
    expected = numpy.array([[0.5, 0.0, 0.0], [0.0, 0.25, 0.25], [0.0, 0.25, 0.25]])
    numpy.testing.assert_allclose(reduced, expected, atol=1e-15)


def test_partial_trace_of_random_states_is_a_density_matrix(rng):
    dimension = math.comb(6, 3)
    A = rng.normal(size=(dimension, dimension)) + 1j * rng.normal(size=(dimension, dimension))
    rho = A @ A.conj().T
    rho /= numpy.trace(rho)
    for n_keep in (1, 2):
        reduced = fqhe_torus.identical_particle_partial_trace(rho, 3, 6, n_keep)
        assert numpy.trace(reduced) == pytest.approx(1.0)
        numpy.testing.assert_allclose(reduced, reduced.conj().T, atol=1e-14)
        assert numpy.linalg.eigvalsh(reduced).min() > -1e-10
    with pytest.raises(ValueError):
        fqhe_torus.identical_particle_partial_trace(rho, 3, 6, 3)


def test_slater_determinant_entropy():
    psi = numpy.zeros(math.comb(5, 3))
    psi[0] = 1.0
    reduced = fqhe_torus.identical_particle_partial_trace(numpy.outer(psi, psi), 3, 5, 1)
    eigenvalues = numpy.linalg.eigvalsh(reduced)
    eigenvalues = eigenvalues[eigenvalues > 1e-15]
    assert -numpy.sum(eigenvalues * numpy.log2(eigenvalues)) == pytest.approx(math.log2(3))
    assert fqhe_torus.slater_baseline(3, 1) == pytest.approx(math.log2(3))


@pytest.mark.parametrize("aspect_ratio", [0.2, 0.6, 1.0])
@pytest.mark.parametrize("n_keep", [1, 2, 3])
def test_filled_level_follows_the_integer_law(aspect_ratio, n_keep):
    result = fqhe_torus.fqhe_entropy(fqhe_torus.FQHESpec(4, 4, aspect_ratio), n_keep)
    assert result.entropy == pytest.approx(fqhe_torus.iqhe_entropy(4, n_keep), abs=1e-9)
    assert result.entropy_minus_slater == pytest.approx(0.0, abs=1e-9)
    assert result.degeneracy == 1


def test_thin_torus_entropy_is_that_of_a_slater_determinant():
    result = fqhe_torus.fqhe_entropy(fqhe_torus.FQHESpec(3, 9, aspect_ratio=0.05), n_keep=1)
    assert result.entropy == pytest.approx(math.log2(3), abs=0.05)
    assert result.degeneracy >= 3


def test_scan_records_failures_and_continues():
    spec = fqhe_torus.FQHESpec(4, 4)
    results = fqhe_torus.fqhe_entropy_scan(spec, 1, [0.5, -1.0, 1.0])
    assert [result.error is None for result in results] == [True, False, True]
    assert math.isnan(results[1].entropy)


def test_largest_jump():
    assert fqhe_torus.largest_jump([1.0, 1.1, 1.6, 1.7]) == 1
    assert fqhe_torus.largest_jump([1.0]) is None


def _annihilator(j, n_orbitals):
    dim = 2 ** n_orbitals
    a = numpy.zeros((dim, dim))
    for mask in range(dim):
        if mask >> j & 1:
            below = bin(mask & ((1 << j) - 1)).count("1")
            a[mask ^ (1 << j), mask] = (-1) ** below
    return a


def test_hamiltonian_matches_dense_second_quantization():
    spec = fqhe_torus.FQHESpec(2, 4, aspect_ratio=0.7)
    tensor = fqhe_torus.InteractionTensor.build(spec)
    a = [_annihilator(j, 4) for j in range(4)]
    for j in range(4):
        for k in range(4):
            anticommutator = a[j] @ a[k].T + a[k].T @ a[j]
            numpy.testing.assert_allclose(anticommutator, numpy.eye(16) * (j == k), atol=1e-15)
    fock = numpy.zeros((16, 16), dtype=complex)
    for (j1, j2, j3, j4), value in tensor.values.items():
        fock += value * a[j1].T @ a[j2].T @ a[j3] @ a[j4]
    masks = fqhe_torus.OccupationBasis.build(2, 4).masks
    expected = fock[numpy.ix_(masks, masks)]
    numpy.testing.assert_allclose(fqhe_torus.build_fqhe_hamiltonian(spec, tensor=tensor).toarray(), expected, atol=1e-12)


def test_aspect_ratio_sweep_crosses_from_slater_to_liquid():
    ratios = [0.05, 0.1, 0.3, 0.6, 1.0]
    results = fqhe_torus.fqhe_entropy_scan(fqhe_torus.FQHESpec(3, 9), 1, ratios)
    assert all(result.error is None for result in results)
    excess = [result.entropy_minus_slater for result in results]
    assert min(excess) > -1e-9
    assert excess[0] < 0.1
    assert excess[-1] > 0.5
    assert results[-1].entropy > results[0].entropy
    jump = fqhe_torus.largest_jump([result.entropy for result in results])
    assert jump is not None and 0 <= jump < len(ratios) - 1
