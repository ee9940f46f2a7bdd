import numpy
import pytest
import scipy.linalg
import scipy.sparse

import spin_chain


@pytest.mark.parametrize("n_sites", [3, 4, 5, 6, 7, 8])
def test_sector_dimensions_partition_the_hilbert_space(n_sites):
    dimensions = spin_chain.sector_dimensions(n_sites)
    assert len(dimensions) == 2 * n_sites
    assert sum(dimension for _, _, dimension in dimensions) == 2**n_sites


def test_sector_basis_holds_orbit_representatives():
    basis = spin_chain.enumerate_sector_basis(6, (0, 1))
    for rep in basis.representatives:
        assert spin_chain.representative(int(rep), 6)[0] == rep
        assert spin_chain.parity(int(rep)) == 1


def test_sector_spectra_union_equals_full_spectrum():
    spec = spin_chain.xyz_spec(8, gamma=0.5, delta=0.3, lam=0.4)
    full = scipy.linalg.eigvalsh(spin_chain.build_full_hamiltonian(spec).toarray())
    sectors = []
    for k in range(8):
        for p in (1, -1):
            basis = spin_chain.enumerate_sector_basis(8, (k, p))
            h = spin_chain.build_sector_hamiltonian(spec, basis).toarray()
            numpy.testing.assert_allclose(h, h.conj().T, atol=1e-12)
            sectors.extend(scipy.linalg.eigvalsh(h))
    numpy.testing.assert_allclose(numpy.sort(sectors), full, atol=1e-9)


def test_ground_state_is_a_normalized_eigenvector():
    spec = spin_chain.xyz_spec(8, gamma=1.0, delta=-0.5, lam=1.9)
    state = spin_chain.ground_state(spec)
    h = spin_chain.build_full_hamiltonian(spec)
    psi = state.full_vector()
    assert abs(numpy.linalg.norm(psi) - 1) < 1e-12
    assert numpy.linalg.norm(h @ psi - state.energy * psi) < 1e-8
    assert state.energy == pytest.approx(scipy.linalg.eigvalsh(h.toarray())[0], abs=1e-9)


def test_open_chain_falls_back_to_the_full_hamiltonian():
    spec = spin_chain.xy_spec(6, gamma=0.5, lam=1.5, boundary="open")
    state = spin_chain.ground_state(spec)
    assert state.sector is None
    lowest = scipy.linalg.eigvalsh(spin_chain.build_full_hamiltonian(spec).toarray())[0]
    assert state.energy == pytest.approx(lowest, abs=1e-10)


def test_one_magnon_block_matches_spin_waves():
    n, lam = 6, 0.3
    h = spin_chain.build_full_hamiltonian(spin_chain.xx_spec(n, lam)).toarray()
    one_down = [1 << (n - 1 - site) for site in range(n)]
    block = h[numpy.ix_(one_down, one_down)]
    expected = sorted(spin_chain.spin_wave_energy(n, k, lam) for k in range(n))
    numpy.testing.assert_allclose(scipy.linalg.eigvalsh(block), expected, atol=1e-12)


def test_full_hamiltonian_respects_the_size_cap():
    with pytest.raises(spin_chain.SizeCapError):
        spin_chain.build_full_hamiltonian(spin_chain.ising_spec(15, 1.0))


@pytest.mark.parametrize(
    "kwargs, error",
    [
        ({"n_sites": 1}, ValueError),
        ({"n_sites": 2.5}, TypeError),
        ({"n_sites": 4, "boundary": "twisted"}, ValueError),
        ({"n_sites": 4, "lambdas": (1.0, 1.0)}, ValueError),
        ({"n_sites": 4, "f": (1.0, 0.0)}, ValueError),
    ],
)
def test_invalid_specs_are_rejected(kwargs, error):
    with pytest.raises(error):
        spin_chain.SpinModelSpec(**kwargs)


def test_invalid_sectors_and_models_are_rejected():
    with pytest.raises(ValueError):
        spin_chain.enumerate_sector_basis(4, (4, 1))
    with pytest.raises(ValueError):
        spin_chain.enumerate_sector_basis(4, (0, 0))
    with pytest.raises(ValueError):
        spin_chain.model_spec("heisenberg", 4)
    open_spec = spin_chain.ising_spec(4, 1.0, boundary="open")
    with pytest.raises(ValueError, match="translation"):
        spin_chain.build_sector_hamiltonian(open_spec, spin_chain.enumerate_sector_basis(4, (0, 1)))


def test_symmetry_operations():
    n = 7
    for state in range(2**n):
        assert spin_chain.reflect(spin_chain.reflect(state, n), n) == state
        assert spin_chain.spin_flip(spin_chain.spin_flip(state, n), n) == state
        assert spin_chain.parity(spin_chain.spin_flip(state, n)) == -spin_chain.parity(state)
        shifted = state
        for _ in range(n):
            shifted = spin_chain.translate(shifted, n)
        assert shifted == state
        rep, shifts = spin_chain.representative(state, n)
        moved = state
        for _ in range(shifts):
            moved = spin_chain.translate(moved, n)
        assert moved == rep


def test_lowest_eigenpairs_of_a_large_sparse_matrix():
    diagonal = numpy.concatenate([numpy.linspace(20.0, 10.0, 997), [2.0, 1.0, 0.0]])
    h = scipy.sparse.diags(diagonal).tocsr()
    energies, vectors = spin_chain.lowest_eigenpairs(h, count=3)
    numpy.testing.assert_allclose(energies, [0.0, 1.0, 2.0], atol=1e-8)
    assert abs(abs(vectors[999, 0]) - 1) < 1e-8


def test_two_site_rdm_of_a_product_state():
    psi = numpy.zeros(8)
    psi[0b010] = 1.0
    rho = spin_chain.two_site_rdm(psi, 0, 1)
    expected = numpy.zeros((4, 4))
    expected[1, 1] = 1.0
    numpy.testing.assert_allclose(rho, expected)
    with pytest.raises(ValueError):
        spin_chain.two_site_rdm(psi, 1, 1)


def test_lowest_eigenpairs_finds_every_copy_of_a_degenerate_level():
    diagonal = numpy.concatenate([numpy.linspace(20.0, 10.0, 996), [1.0, 0.0, 0.0, 0.0]])
    h = scipy.sparse.diags(diagonal).tocsr()
    energies, vectors = spin_chain.lowest_eigenpairs(h, count=3)
    numpy.testing.assert_allclose(energies, [0.0, 0.0, 0.0], atol=1e-8)
    numpy.testing.assert_allclose(vectors.conj().T @ vectors, numpy.eye(3), atol=1e-8)
    assert numpy.abs(vectors[:997]).max() < 1e-8
    (lowest,), _ = spin_chain.lowest_eigenpairs(h, count=1)
    assert lowest == pytest.approx(0.0, abs=1e-8)


def test_lowest_eigenpairs_of_a_large_sector_match_a_dense_solve():
    spec = spin_chain.xx_spec(16, lam=0.0)
    h = spin_chain.build_sector_hamiltonian(spec, spin_chain.enumerate_sector_basis(16, (0, 1)))
    assert h.shape[0] > spin_chain.DENSE_SOLVE_DIM
    energies, vectors = spin_chain.lowest_eigenpairs(h, count=3)
    numpy.testing.assert_allclose(energies, scipy.linalg.eigvalsh(h.toarray())[:3], atol=1e-8)
    residuals = numpy.linalg.norm(h @ vectors - vectors * energies, axis=0)
    assert residuals.max() < 1e-6


def test_two_site_hamiltonian_examples():
    ising = spin_chain.build_full_hamiltonian(spin_chain.ising_spec(2, 0.0)).toarray()
    numpy.testing.assert_allclose(scipy.linalg.eigvalsh(ising), [-2.0, -2.0, 2.0, 2.0], atol=1e-12)
    field_only = spin_chain.SpinModelSpec(2, f=(0.0, 0.0, 0.0), field=(0.0, 0.0, 1.0))
    numpy.testing.assert_allclose(
        spin_chain.build_full_hamiltonian(field_only).toarray(), numpy.diag([-2.0, 0.0, 0.0, 2.0]), atol=1e-12
    )
    assert sum(dimension for _, _, dimension in spin_chain.sector_dimensions(2)) == 4


def test_two_site_rdm_of_a_singlet_is_its_projector():
    singlet = numpy.array([0.0, 1.0, -1.0, 0.0]) / numpy.sqrt(2)
    numpy.testing.assert_allclose(spin_chain.two_site_rdm(singlet, 0, 1), numpy.outer(singlet, singlet), atol=1e-15)


def test_two_site_rdms_of_an_interacting_ground_state_are_density_matrices():
    state = spin_chain.ground_state(spin_chain.xyz_spec(8, gamma=0.5, delta=0.3, lam=0.4))
    for i, j in [(0, 1), (0, 3), (2, 6), (7, 4)]:
        rho = spin_chain.two_site_rdm(state, i, j)
        assert rho.shape == (4, 4)
        assert numpy.trace(rho).real == pytest.approx(1.0)
        numpy.testing.assert_allclose(rho, rho.conj().T, atol=1e-12)
        assert scipy.linalg.eigvalsh(rho).min() > -1e-12
