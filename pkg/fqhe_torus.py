"""
Lowest-Landau-level electrons on a torus.

Orbitals j = 0..N_s-1 are Landau-gauge states centred at x_j = j L_x / N_s on a
torus with L_x L_y = 2 pi N_s (magnetic length 1). Basis states are N_e-subsets
of the orbitals in lexicographic order, encoded as bit masks with orbital j in
bit j. A state is a^dag_{j_1} a^dag_{j_2} ... |0> with j_1 < j_2 < ..., so a^dag_j
and a_j carry the sign (-1)^(number of occupied orbitals below j).
"""
import dataclasses
import itertools
import logging
import math
from collections import namedtuple
from typing import Dict, Tuple

import numpy
import scipy.sparse

import entanglement
import spin_chain

logger = logging.getLogger(__name__)

SECTOR_CAP = 20000
DENSE_SOLVE_DIM = 2000
CUTOFF_TOL = 1e-10
DEGENERACY_TOL = 1e-8
NUM_LOWEST = 6

FQHEEntropy = namedtuple(
    "FQHEEntropy", ["aspect_ratio", "entropy", "entropy_minus_slater", "degeneracy", "error"]
)
GroundMultiplet = namedtuple("GroundMultiplet", ["energy", "vectors", "basis", "momenta"])


@dataclasses.dataclass(frozen=True)
class FQHESpec:
    """
    Args:
        n_electrons (int): N_e.

        n_orbitals (int): N_s, the number of flux quanta.

        aspect_ratio (float): L_y / L_x.

        q_cutoff (int): Number of reciprocal lattice spacings, in units of the
        magnetic length scale, kept in each direction of the interaction sum.

        coupling (float): Overall interaction strength.
    """

    n_electrons: int
    n_orbitals: int
    aspect_ratio: float = 1.0
    q_cutoff: int = 20
    coupling: float = 1.0

    def __post_init__(self):
        if not 1 <= self.n_electrons <= self.n_orbitals:
            raise ValueError(
                f"need 1 <= n_electrons <= n_orbitals, got N_e={self.n_electrons}, N_s={self.n_orbitals}"
            )
        if not self.aspect_ratio > 0:
            raise ValueError(f"aspect_ratio must be positive, got {self.aspect_ratio}")
        if self.q_cutoff < 1:
            raise ValueError(f"q_cutoff must be positive, got {self.q_cutoff}")

    @property
    def filling(self):
        return self.n_electrons / self.n_orbitals

    @property
    def lx(self):
        return math.sqrt(2 * math.pi * self.n_orbitals / self.aspect_ratio)

    @property
    def ly(self):
        return self.aspect_ratio * self.lx

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclasses.dataclass(frozen=True)
class OccupationBasis:
    n_electrons: int
    n_orbitals: int
    masks: numpy.ndarray
    momentum: int = None

    @property
    def dimension(self):
        return len(self.masks)

    @property
    def index(self):
        return {int(mask): a for a, mask in enumerate(self.masks)}

    def occupations(self, a):
        mask = int(self.masks[a])
        return tuple(j for j in range(self.n_orbitals) if mask >> j & 1)

    @classmethod
    def build(cls, n_electrons, n_orbitals, momentum=None):
        """All N_e-subsets in lexicographic order, optionally restricted to sum(j) = momentum mod N_s."""
        masks = [
            sum(1 << j for j in occupied)
            for occupied in itertools.combinations(range(n_orbitals), n_electrons)
            if momentum is None or sum(occupied) % n_orbitals == momentum
        ]
        return cls(n_electrons, n_orbitals, numpy.array(masks, dtype=numpy.int64), momentum)


def momentum_sectors(n_electrons, n_orbitals):
    return {K: OccupationBasis.build(n_electrons, n_orbitals, K) for K in range(n_orbitals)}


### Interaction


def _coupling_sum(spec, d13, d14, cutoff):
    n_s = spec.n_orbitals
    lx, ly = spec.lx, spec.ly
    unit = math.sqrt(2 * math.pi * n_s)
    s_max = cutoff * math.ceil(lx / unit)
    t_max = cutoff * math.ceil(ly / unit)
    s = numpy.arange(-s_max, s_max + 1)
    first = -((t_max + d14) // n_s) * n_s + d14
    t = numpy.arange(first, t_max + 1, n_s)
    t = t[t >= -t_max]
    qx = 2 * math.pi * s / lx
    qy = 2 * math.pi * t / ly
    q2 = qx[:, None] ** 2 + qy[None, :] ** 2
    q2 = numpy.where(q2 == 0, numpy.inf, q2)
    terms = numpy.exp(-q2 / 2) / numpy.sqrt(q2) * numpy.exp(-2j * math.pi * s[:, None] * d13 / n_s)
    return spec.coupling * math.pi / (lx * ly) * terms.sum()


def matrix_element(j1, j2, j3, j4, spec, check_convergence=False):
    """
    Coulomb coupling of a^dag_{j1} a^dag_{j2} a_{j3} a_{j4}, orbitals numbered 1..N_s.

    The sum runs over q = (2 pi s / L_x, 2 pi t / L_y), q != 0, with
    t = j1 - j4 mod N_s, of (1 / q) exp(-q^2 / 2 - 2 pi i s (j1 - j3) / N_s).
    """
    n_s = spec.n_orbitals
    for j in (j1, j2, j3, j4):
        if not 1 <= j <= n_s:
            raise ValueError(f"orbital indices must lie in 1..{n_s}, got {(j1, j2, j3, j4)}")
    if (j1 + j2 - j3 - j4) % n_s:
        return 0j
    d13, d14 = (j1 - j3) % n_s, (j1 - j4) % n_s
    value = _coupling_sum(spec, d13, d14, spec.q_cutoff)
    if check_convergence:
        doubled = _coupling_sum(spec, d13, d14, 2 * spec.q_cutoff)
        if abs(doubled - value) > CUTOFF_TOL:
            raise ValueError(
                f"q_cutoff={spec.q_cutoff} too small: doubling it changes the element by {abs(doubled - value):.2e}"
            )
    return complex(value)


@dataclasses.dataclass(frozen=True)
class InteractionTensor:
    """Couplings of all momentum-conserving (j1, j2, j3, j4), orbitals numbered from 0."""

    spec: FQHESpec
    values: Dict[Tuple[int, int, int, int], complex]

    @classmethod
    def build(cls, spec, check_convergence=True):
        """Every coupling from the n_s^2 offset pairs, each checked against a doubled cutoff by default."""
        n_s = spec.n_orbitals
        by_offset = {}
        for d13 in range(n_s):
            for d14 in range(n_s):
                # Orbital 1 as j1 reaches every offset pair
                by_offset[d13, d14] = matrix_element(
                    1, 1 + (-d13 - d14) % n_s, 1 + (-d13) % n_s, 1 + (-d14) % n_s, spec, check_convergence
                )
        values = {}
        for j1, j3, j4 in itertools.product(range(n_s), repeat=3):
            j2 = (j3 + j4 - j1) % n_s
            values[j1, j2, j3, j4] = complex(by_offset[(j1 - j3) % n_s, (j1 - j4) % n_s])
        return cls(spec, values)


### Hamiltonian


def _sign_below(mask, j):
    return -1 if bin(mask & ((1 << j) - 1)).count("1") & 1 else 1


def build_fqhe_hamiltonian(spec, basis=None, tensor=None, size_cap=SECTOR_CAP):
    """
    H = sum A(j1, j2, j3, j4) a^dag_{j1} a^dag_{j2} a_{j3} a_{j4} over an occupation basis.

    The one-body constant W is left out. The basis defaults to the full
    C(N_s, N_e) space.
    """
    basis = OccupationBasis.build(spec.n_electrons, spec.n_orbitals) if basis is None else basis
    if basis.dimension > size_cap:
        raise spin_chain.SizeCapError(f"basis of dimension {basis.dimension} exceeds the cap {size_cap}")
    tensor = InteractionTensor.build(spec) if tensor is None else tensor
    n_s = spec.n_orbitals
    index = basis.index
    rows, cols, values = [], [], []
    for a, mask in enumerate(basis.masks):
        mask = int(mask)
        occupied = [j for j in range(n_s) if mask >> j & 1]
        for j3, j4 in itertools.permutations(occupied, 2):
            sign = _sign_below(mask, j4)
            removed = mask ^ (1 << j4)
            sign *= _sign_below(removed, j3)
            removed ^= 1 << j3
            for j1 in range(n_s):
                j2 = (j3 + j4 - j1) % n_s
                if j1 == j2 or removed >> j2 & 1 or removed >> j1 & 1:
                    continue
                amplitude = sign * _sign_below(removed, j2)
                added = removed | (1 << j2)
                amplitude *= _sign_below(added, j1)
                added |= 1 << j1
                b = index.get(added)
                if b is None:
                    continue
                rows.append(b)
                cols.append(a)
                values.append(amplitude * tensor.values[j1, j2, j3, j4])
    dim = basis.dimension
    return scipy.sparse.coo_matrix((values, (rows, cols)), shape=(dim, dim), dtype=complex).tocsr()


def ground_multiplet(spec, use_sectors=True, tensor=None, size_cap=SECTOR_CAP):
    """
    Lowest energy level over all momentum sectors, with its full-basis eigenvectors.

    Returns:
        GroundMultiplet(energy, vectors, basis, momenta) with vectors as columns over
        the full lexicographic basis.
    """
    tensor = InteractionTensor.build(spec) if tensor is None else tensor
    full = OccupationBasis.build(spec.n_electrons, spec.n_orbitals)
    if use_sectors:
        bases = list(momentum_sectors(spec.n_electrons, spec.n_orbitals).values())
    else:
        if spec.n_orbitals > 12:
            raise spin_chain.SizeCapError(f"full-basis solve requested for N_s={spec.n_orbitals}, the cap is 12")
        bases = [full]
    levels = []
    for basis in bases:
        if basis.dimension == 0:
            continue
        h = build_fqhe_hamiltonian(spec, basis, tensor, size_cap)
        energies, vectors = spin_chain.lowest_eigenpairs(h, NUM_LOWEST, dense_dim=DENSE_SOLVE_DIM)
        levels.extend((e, vectors[:, i], basis) for i, e in enumerate(energies))
    energy = min(level[0] for level in levels)
    tol = DEGENERACY_TOL * max(1.0, abs(energy))
    full_index = full.index
    columns, momenta = [], []
    for e, vector, basis in levels:
        if e - energy >= tol:
            continue
        expanded = numpy.zeros(full.dimension, dtype=complex)
        for a, mask in enumerate(basis.masks):
            expanded[full_index[int(mask)]] = vector[a]
        columns.append(expanded)
        momenta.append(basis.momentum)
    if use_sectors and len(columns) > 1:
        logger.info(f"ground level of N_e={spec.n_electrons}, N_s={spec.n_orbitals} is {len(columns)}-fold degenerate")
    return GroundMultiplet(float(energy), numpy.column_stack(columns), full, momenta)


### Identical-particle partial trace


def identical_particle_partial_trace(rho, n_electrons, n_orbitals, n_keep, fermionic_signs=False):
    """
    Reduce a density matrix over C(N_s, N_e) to C(N_s, n_keep) by tracing out N_e - n_keep particles.

    rho' = sum_T M_T rho M_T^T / C(N_e, n_keep), where M_T maps each state containing
    the traced orbitals T to the state with T removed. With fermionic_signs the
    removal carries the annihilation signs.
    """
    if not 1 <= n_keep < n_electrons:
        raise ValueError(f"n_keep must satisfy 1 <= n_keep < {n_electrons}, got {n_keep}")
    source = OccupationBasis.build(n_electrons, n_orbitals)
    target = OccupationBasis.build(n_keep, n_orbitals)
    rho = numpy.asarray(rho)
    if rho.shape != (source.dimension, source.dimension):
        raise ValueError(f"rho must be {source.dimension}x{source.dimension}, got {rho.shape}")
    target_index = target.index
    reduced = numpy.zeros((target.dimension, target.dimension), dtype=complex)
    for traced in itertools.combinations(range(n_orbitals), n_electrons - n_keep):
        traced_mask = sum(1 << j for j in traced)
        rows, cols, signs = [], [], []
        for a, mask in enumerate(source.masks):
            mask = int(mask)
            if mask & traced_mask != traced_mask:
                continue
            sign = 1
            if fermionic_signs:
                remaining = mask
                for j in reversed(traced):
                    sign *= _sign_below(remaining, j)
                    remaining ^= 1 << j
            rows.append(target_index[mask ^ traced_mask])
            cols.append(a)
            signs.append(sign)
        if not rows:
            continue
        M = numpy.zeros((target.dimension, source.dimension))
        M[rows, cols] = signs
        reduced += M @ rho @ M.T
    return reduced / math.comb(n_electrons, n_keep)


def slater_baseline(n_electrons, n_keep):
    """log2 C(N_e, n_keep), the n_keep-particle entropy of a single Slater determinant."""
    return math.log2(math.comb(n_electrons, n_keep))


def iqhe_entropy(n_orbitals, n_keep):
    return math.log2(math.comb(n_orbitals, n_keep))


def fqhe_entropy(spec, n_keep=1, fermionic_signs=False):
    """
    n_keep-particle entropy of the ground level, averaged over a degenerate multiplet.

    Returns:
        FQHEEntropy with the raw entropy and the entropy minus the Slater baseline.
    """
    multiplet = ground_multiplet(spec)
    entropies = []
    for psi in multiplet.vectors.T:
        rho = numpy.outer(psi, psi.conj())
        reduced = identical_particle_partial_trace(
            rho, spec.n_electrons, spec.n_orbitals, n_keep, fermionic_signs
        )
        entropies.append(entanglement.density_matrix_entropy(reduced))
    entropy = float(numpy.mean(entropies))
    return FQHEEntropy(
        spec.aspect_ratio,
        entropy,
        entropy - slater_baseline(spec.n_electrons, n_keep),
        len(entropies),
        None,
    )


def fqhe_entropy_scan(spec, n_keep, aspect_ratios, fermionic_signs=False):
    """Entropy at each aspect ratio; failing points keep their error message."""
    results = []
    for ratio in aspect_ratios:
        try:
            results.append(fqhe_entropy(spec.replace(aspect_ratio=ratio), n_keep, fermionic_signs))
        except (ValueError, RuntimeError, ArithmeticError) as err:
            logger.warning(f"aspect ratio {ratio} failed: {err}")
            results.append(FQHEEntropy(ratio, math.nan, math.nan, 0, str(err)))
    return results


def largest_jump(entropies):
    """Index i maximizing S[i + 1] - S[i] over a scan, or None for fewer than two points."""
    entropies = numpy.asarray(entropies, dtype=float)
    if len(entropies) < 2:
        return None
    return int(numpy.nanargmax(numpy.diff(entropies)))
