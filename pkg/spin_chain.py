"""
Spin-1/2 chain Hamiltonians and their exact diagonalization.

Bit conventions used throughout the package: site n of an N-site chain is
stored in bit (N - 1 - n) of the basis index, so site 0 is the most
significant bit and the ordering matches numpy.kron / reshape([2] * N).
A set bit is a down spin (sigma^z = -1), which the Jordan-Wigner mapping in
fermion_chain treats as an occupied fermion mode.
"""
import dataclasses
import logging
import math
import warnings
from collections import namedtuple
from typing import Optional, Tuple

import numpy
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

logger = logging.getLogger(__name__)

DENSE_CAP = 14  # Largest chain for which the full 2^N Hamiltonian is built
SECTOR_CAP = 20000  # Largest (k, p) sector handled by the iterative solver
DENSE_SOLVE_DIM = 600  # Sectors up to this dimension are solved with a dense eigh
ARPACK_TOL = 1e-10
RESIDUAL_TOL = 1e-6
EXTRA_PAIRS = 4  # Spare ARPACK eigenpairs beyond the requested count
DEGENERACY_TOL = 1e-9
NUM_LOWEST = 3  # Eigenvalues kept per sector to count ground-state degeneracy

PAULI = {
    "i": scipy.sparse.identity(2, dtype=complex, format="csr"),
    "x": scipy.sparse.csr_matrix(numpy.array([[0, 1], [1, 0]], dtype=complex)),
    "y": scipy.sparse.csr_matrix(numpy.array([[0, -1j], [1j, 0]], dtype=complex)),
    "z": scipy.sparse.csr_matrix(numpy.array([[1, 0], [0, -1]], dtype=complex)),
}


class SizeCapError(ValueError):
    """Raised when a requested problem exceeds a configured size cap."""


class ConvergenceError(RuntimeError):
    """Raised when the iterative eigensolver does not converge."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual norm {residual:.3e})")
        self.residual = residual


SymmetrySector = namedtuple("SymmetrySector", ["k", "p"])


@dataclasses.dataclass(frozen=True)
class SpinModelSpec:
    """
    Parameters of H = -sum_n [sum_a f_a s^a_n s^a_{n+1} + g . (s_n x s_{n+1}) + h . s_n].

    Args:
        n_sites (int): Number of spins, at least 2.

        f (tuple): Couplings (f_x, f_y, f_z).

        g (tuple): Dzyaloshinskii couplings (g_x, g_y, g_z).

        field (tuple): Uniform field (h_x, h_y, h_z), h_z is the lambda of the XY family.

        boundary (str): "periodic" or "open".

        lambdas (tuple, optional): Per-site z field, overrides field[2].

        gammas (tuple, optional): Per-bond anisotropy, bond n joins sites n and n+1.
    """

    n_sites: int
    f: Tuple[float, float, float] = (1.0, 0.0, 0.0)
    g: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    field: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    boundary: str = "periodic"
    lambdas: Optional[Tuple[float, ...]] = None
    gammas: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if not isinstance(self.n_sites, (int, numpy.integer)):
            raise TypeError(f"n_sites must be an integer, got {type(self.n_sites).__name__}")
        if self.n_sites < 2:
            raise ValueError(f"n_sites must be at least 2, got {self.n_sites}")
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f'boundary must be "periodic" or "open", got {self.boundary!r}')
        for name in ("f", "g", "field"):
            value = tuple(float(x) for x in getattr(self, name))
            if len(value) != 3:
                raise ValueError(f"{name} must have 3 components, got {len(value)}")
            object.__setattr__(self, name, value)
        for name in ("lambdas", "gammas"):
            value = getattr(self, name)
            if value is None:
                continue
            value = tuple(float(x) for x in value)
            if len(value) != self.n_sites:
                raise ValueError(
                    f"{name} must have one entry per site ({self.n_sites}), got {len(value)}"
                )
            object.__setattr__(self, name, value)

    @property
    def gamma(self):
        return self.f[0] - self.f[1]

    @property
    def delta(self):
        return self.f[2]

    @property
    def lam(self):
        return self.field[2]

    @property
    def is_uniform(self):
        return self.lambdas is None and self.gammas is None

    def bonds(self):
        last = self.n_sites if self.boundary == "periodic" else self.n_sites - 1
        return [(n, (n + 1) % self.n_sites) for n in range(last)]

    def site_field(self, n):
        h_x, h_y, h_z = self.field
        if self.lambdas is not None:
            h_z = self.lambdas[n]
        return h_x, h_y, h_z

    def bond_couplings(self, n):
        f_x, f_y, f_z = self.f
        if self.gammas is not None:
            total = f_x + f_y
            f_x, f_y = (total + self.gammas[n]) / 2, (total - self.gammas[n]) / 2
        return f_x, f_y, f_z

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def xyz_spec(n_sites, gamma=1.0, delta=0.0, lam=0.0, boundary="periodic", **overrides):
    """XYZ chain in the (1 + gamma)/2, (1 - gamma)/2, delta normalization."""
    return SpinModelSpec(
        n_sites=n_sites,
        f=((1 + gamma) / 2, (1 - gamma) / 2, delta),
        field=(0.0, 0.0, lam),
        boundary=boundary,
        **overrides,
    )


def xy_spec(n_sites, gamma=1.0, lam=0.0, boundary="periodic", **overrides):
    return xyz_spec(n_sites, gamma, 0.0, lam, boundary, **overrides)


def ising_spec(n_sites, lam=0.0, boundary="periodic", **overrides):
    return xyz_spec(n_sites, 1.0, 0.0, lam, boundary, **overrides)


def xx_spec(n_sites, lam=0.0, boundary="periodic", **overrides):
    return xyz_spec(n_sites, 0.0, 0.0, lam, boundary, **overrides)


def spin_wave_energy(n_sites, k, lam):
    """Energy of the one-magnon XX state with wave number 2 pi k / N."""
    return -2 * math.cos(2 * math.pi * k / n_sites) - lam * (n_sites - 2)


### Bit-string symmetry operations


def translate(state, n_sites):
    return (state >> 1) | ((state & 1) << (n_sites - 1))


def reflect(state, n_sites):
    return int(format(state, f"0{n_sites}b")[::-1], 2)


def spin_flip(state, n_sites):
    return state ^ ((1 << n_sites) - 1)


def parity(state):
    return 1 - 2 * (bin(state).count("1") & 1)


def representative(state, n_sites):
    """
    Smallest member of the translation orbit of state.

    Returns:
        (rep, shifts) such that translating state `shifts` times gives rep.
    """
    rep, shifts = state, 0
    current = state
    for l in range(1, n_sites):
        current = translate(current, n_sites)
        if current < rep:
            rep, shifts = current, l
    return rep, shifts


def orbit_size(state, n_sites):
    current = translate(state, n_sites)
    size = 1
    while current != state:
        current = translate(current, n_sites)
        size += 1
    return size


def spin_z(states, site, n_sites):
    """sigma^z eigenvalue of `site` for an array of basis indices."""
    return 1 - 2 * ((numpy.asarray(states) >> (n_sites - 1 - site)) & 1)


@dataclasses.dataclass(frozen=True)
class SectorBasis:
    n_sites: int
    sector: SymmetrySector
    representatives: numpy.ndarray
    orbit_sizes: numpy.ndarray

    @property
    def dimension(self):
        return len(self.representatives)

    @property
    def index(self):
        return {int(rep): a for a, rep in enumerate(self.representatives)}


def enumerate_sector_basis(n_sites, sector):
    """
    Translation-orbit representatives of the (k, p) sector.

    Args:
        n_sites (int): Chain length.

        sector (SymmetrySector or tuple): Wave number k in 0..N-1 and parity p = +1 / -1.

    Returns:
        SectorBasis whose representatives are the smallest integers of their orbits.
    """
    k, p = sector
    if not 0 <= k < n_sites:
        raise ValueError(f"wave number k must be in 0..{n_sites - 1}, got {k}")
    if p not in (1, -1):
        raise ValueError(f"parity p must be +1 or -1, got {p}")
    reps, sizes = [], []
    for state in range(2**n_sites):
        if parity(state) != p:
            continue
        rep, _ = representative(state, n_sites)
        if rep != state:
            continue
        size = orbit_size(state, n_sites)
        if (k * size) % n_sites == 0:
            reps.append(state)
            sizes.append(size)
    return SectorBasis(
        n_sites,
        SymmetrySector(k, p),
        numpy.array(reps, dtype=numpy.int64),
        numpy.array(sizes, dtype=numpy.int64),
    )


def sector_dimensions(n_sites):
    """List of (k, p, dimension) over every translation x parity sector."""
    return [
        (k, p, enumerate_sector_basis(n_sites, (k, p)).dimension)
        for k in range(n_sites)
        for p in (1, -1)
    ]


### Hamiltonians


def site_operator(op, site, n_sites):
    left = scipy.sparse.identity(2**site, dtype=complex, format="csr")
    right = scipy.sparse.identity(2 ** (n_sites - site - 1), dtype=complex, format="csr")
    return scipy.sparse.kron(scipy.sparse.kron(left, PAULI[op]), right, format="csr")


def build_full_hamiltonian(spec, dense_cap=DENSE_CAP):
    """
    Full 2^N Hamiltonian in the computational basis, as a sparse csr matrix.
    """
    n = spec.n_sites
    if n > dense_cap:
        raise SizeCapError(f"full Hamiltonian requested for N={n}, the cap is N={dense_cap}")
    if n > 12:
        warnings.warn(f"Building the full Hamiltonian of N={n} sites: {2**n} basis states")
    ops = {
        (op, site): site_operator(op, site, n) for op in "xyz" for site in range(n)
    }
    h = scipy.sparse.csr_matrix((2**n, 2**n), dtype=complex)
    for bond, (a, b) in enumerate(spec.bonds()):
        f_x, f_y, f_z = spec.bond_couplings(bond)
        g_x, g_y, g_z = spec.g
        for coupling, op in ((f_x, "x"), (f_y, "y"), (f_z, "z")):
            if coupling:
                h = h + coupling * (ops[op, a] @ ops[op, b])
        # g . (s_a x s_b)
        for coupling, (p, q) in ((g_x, ("y", "z")), (g_y, ("z", "x")), (g_z, ("x", "y"))):
            if coupling:
                h = h + coupling * (ops[p, a] @ ops[q, b] - ops[q, a] @ ops[p, b])
    for site in range(n):
        for coupling, op in zip(spec.site_field(site), "xyz"):
            if coupling:
                h = h + coupling * ops[op, site]
    return (-h).tocsr()


def check_sector_compatible(spec):
    problems = []
    if spec.boundary != "periodic":
        problems.append("open boundaries break translation invariance")
    if not spec.is_uniform:
        problems.append("per-site overrides break translation invariance")
    if spec.field[0] or spec.field[1]:
        problems.append("transverse x/y fields break parity")
    if spec.g[0] or spec.g[1]:
        problems.append("g_x, g_y break parity")
    if problems:
        raise ValueError(
            "spec does not commute with translation and parity: "
            + "; ".join(problems)
            + ". Use build_full_hamiltonian instead."
        )


def _apply_hamiltonian(state, spec):
    """Yield (amplitude, new_state) pairs of H acting on a basis state."""
    n = spec.n_sites
    diagonal = 0.0
    h_z = spec.field[2]
    f_x, f_y, f_z = spec.f
    g_z = spec.g[2]
    for a, b in spec.bonds():
        bit_a, bit_b = 1 << (n - 1 - a), 1 << (n - 1 - b)
        z_a = -1 if state & bit_a else 1
        z_b = -1 if state & bit_b else 1
        diagonal += f_z * z_a * z_b
        amplitude = (f_x - f_y) if z_a == z_b else (f_x + f_y)
        amplitude = amplitude + 1j * g_z * (z_b - z_a)
        if amplitude != 0:
            yield -amplitude, state ^ bit_a ^ bit_b
    if h_z:
        diagonal += h_z * (n - 2 * bin(state).count("1"))
    yield -diagonal, state


def build_sector_hamiltonian(spec, basis):
    """
    Hamiltonian block of the (k, p) sector.

    The sector states are |a(k)> = R_a^{-1/2} sum_{n < R_a} e^{-i theta n} T^n |a>,
    theta = 2 pi k / N, and the element reached from a through b = T^l s carries
    the phase e^{-i theta l} and the weight sqrt(R_a / R_b).
    """
    check_sector_compatible(spec)
    n = spec.n_sites
    if basis.n_sites != n:
        raise ValueError(f"basis built for N={basis.n_sites}, spec has N={n}")
    theta = 2 * math.pi * basis.sector.k / n
    index = basis.index
    rows, cols, values = [], [], []
    for a, (rep, size_a) in enumerate(zip(basis.representatives, basis.orbit_sizes)):
        for amplitude, target in _apply_hamiltonian(int(rep), spec):
            b_rep, shifts = representative(target, n)
            b = index.get(b_rep)
            if b is None:
                continue
            size_b = basis.orbit_sizes[b]
            rows.append(b)
            cols.append(a)
            values.append(amplitude * numpy.exp(-1j * theta * shifts) * math.sqrt(size_a / size_b))
    dim = basis.dimension
    return scipy.sparse.coo_matrix((values, (rows, cols)), shape=(dim, dim)).tocsr()


### Ground states


@dataclasses.dataclass(frozen=True)
class DenseGroundState:
    energy: float
    amplitudes: numpy.ndarray
    sector: Optional[SymmetrySector]
    basis: Optional[SectorBasis]
    n_sites: int
    degeneracy: int = 1

    def full_vector(self):
        """Amplitudes over the 2^N computational basis."""
        if self.basis is None:
            return self.amplitudes
        n = self.n_sites
        theta = 2 * math.pi * self.sector.k / n
        psi = numpy.zeros(2**n, dtype=complex)
        for coefficient, rep, size in zip(
            self.amplitudes, self.basis.representatives, self.basis.orbit_sizes
        ):
            state = int(rep)
            weight = coefficient / math.sqrt(size)
            for shift in range(size):
                psi[state] += weight * numpy.exp(-1j * theta * shift)
                state = translate(state, n)
        return psi


def _arpack_lowest(h, k, v0, ncv=None):
    try:
        energies, vectors = scipy.sparse.linalg.eigsh(h, k=k, which="SA", v0=v0, ncv=ncv, tol=ARPACK_TOL)
    except scipy.sparse.linalg.ArpackNoConvergence as err:
        residual = numpy.inf
        if len(err.eigenvalues):
            residual = numpy.linalg.norm(
                h @ err.eigenvectors[:, 0] - err.eigenvalues[0] * err.eigenvectors[:, 0]
            )
        raise ConvergenceError(f"ARPACK did not converge on a {h.shape[0]}-dimensional sector", residual) from err
    order = numpy.argsort(energies)
    return energies[order], vectors[:, order]


def lowest_eigenpairs(h, count=NUM_LOWEST, seed=0, dense_dim=DENSE_SOLVE_DIM):
    """
    Lowest eigenpairs of a sparse Hermitian matrix, ascending.

    Small matrices go through a dense eigh. Larger ones go through ARPACK with a
    deterministic starting vector and EXTRA_PAIRS spare eigenpairs. The result is
    then deflated: the found vectors are pushed up the spectrum and ARPACK is run
    again, and any eigenvalue it finds below the last returned one (a missed
    level or a missed copy of a degenerate level) is added until none is left.

    Raises:
        ConvergenceError: When ARPACK fails, a returned vector has a residual
        above RESIDUAL_TOL or the deflation does not settle.
    """
    dim = h.shape[0]
    count = min(count, dim)
    if dim <= dense_dim:
        energies, vectors = scipy.linalg.eigh(h.toarray(), subset_by_index=[0, count - 1])
        return energies, vectors
    count = min(count, dim - 2)
    k = min(count + EXTRA_PAIRS, dim - 2)
    rng = numpy.random.RandomState(seed)
    energies, vectors = _arpack_lowest(h, k, rng.rand(dim), ncv=min(dim - 1, max(2 * k + 1, 40)))

    for _ in range(count + 1):
        ceiling = energies[count - 1]
        penalty = energies[-1] - energies[0] + abs(ceiling) + 1.0
        found = vectors
        deflated = scipy.sparse.linalg.LinearOperator(
            h.shape,
            matvec=lambda x, V=found, shift=penalty: h @ x + shift * (V @ (V.conj().T @ x)),
            dtype=numpy.result_type(h.dtype, found.dtype),
        )
        extra_energy, extra_vector = _arpack_lowest(deflated, 1, rng.rand(dim))
        if extra_energy[0] >= ceiling - DEGENERACY_TOL * max(1.0, abs(ceiling)):
            break
        logger.debug(f"deflation found a missed eigenvalue {extra_energy[0]:.12f} below {ceiling:.12f}")
        energies = numpy.append(energies, extra_energy)
        vectors = numpy.hstack([vectors, extra_vector])
        order = numpy.argsort(energies)
        energies, vectors = energies[order], vectors[:, order]
    else:
        raise ConvergenceError(f"deflation did not settle on a {dim}-dimensional sector", numpy.inf)

    energies, vectors = energies[:count], vectors[:, :count]
    residuals = numpy.linalg.norm(h @ vectors - vectors * energies, axis=0)
    if residuals.max() > RESIDUAL_TOL:
        raise ConvergenceError(
            f"ARPACK eigenvector inaccurate on a {dim}-dimensional sector", float(residuals.max())
        )
    return energies, vectors


def ground_state(spec, dense_cap=DENSE_CAP, sector_cap=SECTOR_CAP, seed=0):
    """
    Global ground state, searched over every (k, p) sector.

    Ties are broken to the lowest k, then to p = +1. Specs that break translation
    or parity fall back to the full Hamiltonian (N <= dense_cap) and carry no sector.

    Returns:
        DenseGroundState with the degeneracy of the lowest level.
    """
    n = spec.n_sites
    try:
        check_sector_compatible(spec)
    except ValueError:
        logger.debug("spec is not sector compatible, solving the full Hamiltonian")
        h = build_full_hamiltonian(spec, dense_cap)
        energies, vectors = lowest_eigenpairs(h, NUM_LOWEST + 1, seed)
        tol = DEGENERACY_TOL * max(1.0, abs(energies[0]))
        degeneracy = int(numpy.sum(energies - energies[0] < tol))
        return DenseGroundState(float(energies[0]), vectors[:, 0], None, None, n, degeneracy)

    best = None
    lowest = []
    for k in range(n):
        for p in (1, -1):
            basis = enumerate_sector_basis(n, (k, p))
            if basis.dimension == 0:
                continue
            if basis.dimension > sector_cap:
                raise SizeCapError(
                    f"sector (k={k}, p={p}) has dimension {basis.dimension}, the cap is {sector_cap}"
                )
            h = build_sector_hamiltonian(spec, basis)
            energies, vectors = lowest_eigenpairs(h, NUM_LOWEST, seed)
            lowest.extend(energies)
            tol = DEGENERACY_TOL * max(1.0, abs(energies[0]))
            if best is None or energies[0] < best[0] - tol:
                best = (float(energies[0]), vectors[:, 0], basis)
    energy, vector, basis = best
    lowest = numpy.array(lowest)
    degeneracy = int(numpy.sum(lowest - energy < DEGENERACY_TOL * max(1.0, abs(energy))))
    if 1 < degeneracy:
        logger.warning(f"ground state of N={n} is {degeneracy}-fold degenerate, returning sector {basis.sector}")
    return DenseGroundState(energy, vector, basis.sector, basis, n, degeneracy)


### Reduced density matrices


def reduced_density_matrix(psi, sites, n_sites):
    """Density matrix of `sites` (in the given order) for a pure state over 2^N."""
    sites = list(sites)
    if len(set(sites)) != len(sites):
        raise ValueError(f"sites must be distinct, got {sites}")
    if any(not 0 <= s < n_sites for s in sites):
        raise ValueError(f"sites must lie in 0..{n_sites - 1}, got {sites}")
    rest = [s for s in range(n_sites) if s not in sites]
    tensor = numpy.asarray(psi).reshape([2] * n_sites).transpose(sites + rest)
    matrix = tensor.reshape(2 ** len(sites), -1)
    return matrix @ matrix.conj().T


def two_site_rdm(state, i, j):
    """
    4x4 density matrix of sites i and j in the basis |up up>, |up down>, |down up>, |down down>.

    Args:
        state (DenseGroundState or array): Ground state or a full 2^N vector.
    """
    if i == j:
        raise ValueError(f"two_site_rdm needs two different sites, got i = j = {i}")
    if isinstance(state, DenseGroundState):
        psi, n = state.full_vector(), state.n_sites
    else:
        psi = numpy.asarray(state)
        n = int(round(math.log2(len(psi))))
    return reduced_density_matrix(psi, [i, j], n)


MODELS = ("ising", "xx", "xy", "xyz")


def model_spec(model, n_sites, gamma=1.0, delta=0.0, lam=0.0, boundary="periodic"):
    """Spec of a named model family; parameters the family does not use are ignored."""
    if model == "ising":
        return ising_spec(n_sites, lam, boundary)
    if model == "xx":
        return xx_spec(n_sites, lam, boundary)
    if model == "xy":
        return xy_spec(n_sites, gamma, lam, boundary)
    if model == "xyz":
        return xyz_spec(n_sites, gamma, delta, lam, boundary)
    raise ValueError(f"unknown model {model!r}, expected one of {', '.join(MODELS)}")
