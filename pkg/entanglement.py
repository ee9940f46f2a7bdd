"""
Entanglement measures for free-fermion and dense ground states, in bits.
"""
import dataclasses
import heapq
import logging
import math
from collections import namedtuple
from typing import Dict, Tuple

import numpy
import scipy.linalg
from scipy.special import xlogy

import fermion_chain
import spin_chain

logger = logging.getLogger(__name__)

PAIRING_TOL = 1e-8
CLAMP_TOL = 1e-12
PSD_TOL = 1e-9
CORRELATION_FLOOR = 1e-12
MIN_FIT_DISTANCE = 2
MIN_FIT_POINTS = 4

CorrelationLength = namedtuple("CorrelationLength", ["xi", "residual", "n_points"])


def binary_entropy(x):
    x = numpy.asarray(x, dtype=float)
    return -(xlogy(x, x) + xlogy(1 - x, 1 - x)) / math.log(2)


def entropy_from_weights(weights):
    weights = numpy.asarray(weights, dtype=float)
    return float(-numpy.sum(xlogy(weights, weights)) / math.log(2))


@dataclasses.dataclass(frozen=True)
class BlockSpectrum:
    lambdas: numpy.ndarray
    block_size: int

    def __post_init__(self):
        lambdas = numpy.asarray(self.lambdas, dtype=float)
        if numpy.any(lambdas < -CLAMP_TOL) or numpy.any(lambdas > 1 + CLAMP_TOL):
            raise ValueError(f"block occupations outside [0, 1]: {lambdas.min()}, {lambdas.max()}")
        object.__setattr__(self, "lambdas", numpy.clip(lambdas, 0.0, 1.0))


@dataclasses.dataclass(frozen=True)
class EntropyProfile:
    n_sites: int
    values: Dict[int, float]

    def __getitem__(self, ell):
        return self.values[ell]

    @property
    def ells(self):
        return sorted(self.values)


@dataclasses.dataclass(frozen=True)
class SchmidtSpectrum:
    weights: numpy.ndarray
    patterns: Tuple[Tuple[int, ...], ...]
    truncation_mass: float

    @property
    def entropy(self):
        return entropy_from_weights(self.weights)


### Free-fermion path


def block_correlation(source, sites):
    """
    Restriction of a Majorana correlation matrix to the modes of `sites`.

    Args:
        source (DiagonalizedChain or numpy.ndarray): A diagonalized chain (its
        vacuum is used) or a full 2N x 2N correlation matrix.

        sites (iterable): Ordered distinct sites; both Majoranas of each are kept.
    """
    if isinstance(source, fermion_chain.DiagonalizedChain):
        source = fermion_chain.correlation_matrix(source)
    sites = list(sites)
    if len(set(sites)) != len(sites):
        raise ValueError(f"sites must be distinct, got {sites}")
    n = source.shape[0] // 2
    if any(not 0 <= s < n for s in sites):
        raise ValueError(f"sites must lie in 0..{n - 1}, got {sites}")
    index = [i for s in sites for i in (2 * s, 2 * s + 1)]
    return source[numpy.ix_(index, index)]


def block_occupations(gamma_block):
    """Occupations lambda_k = 1/2 + nu_k from the +-nu_k eigenvalue pairs of a block correlation matrix."""
    eigenvalues = scipy.linalg.eigvalsh(gamma_block)
    m = len(eigenvalues) // 2
    pairing = numpy.abs(eigenvalues[:m] + eigenvalues[::-1][:m]).max() if m else 0.0
    if pairing > PAIRING_TOL:
        raise ValueError(f"correlation matrix eigenvalues are not paired (residual {pairing:.2e})")
    return BlockSpectrum(0.5 + eigenvalues[m:], m)


def von_neumann_entropy(b):
    return float(numpy.sum(binary_entropy(b.lambdas)))


def single_copy(b):
    return float(-numpy.sum(numpy.log2(numpy.maximum(b.lambdas, 1 - b.lambdas))))


def renyi_entropy(b, alpha):
    """
    Renyi entropy (1 / (1 - alpha)) sum_k log2(l_k^alpha + (1 - l_k)^alpha).

    alpha = 1 gives the von Neumann entropy and alpha = inf the single-copy entropy.
    """
    if alpha <= 0:
        raise ValueError(f"Renyi order must be positive, got {alpha}")
    if alpha == 1:
        return von_neumann_entropy(b)
    if math.isinf(alpha):
        return single_copy(b)
    lam = b.lambdas
    return float(numpy.sum(numpy.log2(lam**alpha + (1 - lam) ** alpha)) / (1 - alpha))


def schmidt_spectrum(b, K):
    """
    The K largest weights prod_k [(1 - n_k) l_k + n_k (1 - l_k)] of a block.

    Each mode starts in its likelier outcome and modes are sorted by the
    cost ratio r_k = min / max. The best-first search starts with no mode flipped;
    a pattern whose last flipped mode (in sorted order) is i has the
    children "also flip i + 1" and "move flip i to i + 1", so every pattern is
    reached exactly once and children never outweigh their parent.
    """
    if K < 1:
        raise ValueError(f"K must be at least 1, got {K}")
    lam = b.lambdas
    big = numpy.maximum(lam, 1 - lam)
    ratios = numpy.minimum(lam, 1 - lam) / numpy.where(big > 0, big, 1.0)
    order = numpy.argsort(-ratios, kind="stable")
    ratios = ratios[order]
    flips_to = numpy.where(lam[order] >= 0.5, 1, 0)
    top = float(numpy.prod(big))
    n_modes = len(lam)
    total = 2**n_modes

    weights, patterns = [top], [()]
    heap = []
    if n_modes:
        heapq.heappush(heap, (-top * ratios[0], (0,)))
    while heap and len(weights) < min(K, total):
        neg_weight, flipped = heapq.heappop(heap)
        weight = -neg_weight
        weights.append(weight)
        patterns.append(flipped)
        last = flipped[-1]
        if last + 1 < n_modes:
            heapq.heappush(heap, (-weight * ratios[last + 1], flipped + (last + 1,)))
            if ratios[last] > 0:
                heapq.heappush(
                    heap, (-weight * ratios[last + 1] / ratios[last], flipped[:-1] + (last + 1,))
                )
    occupations = []
    for flipped in patterns:
        pattern = [int(1 - f) for f in flips_to]
        for i in flipped:
            pattern[i] = int(flips_to[i])
        occupation = [0] * n_modes
        for position, mode in enumerate(order):
            occupation[mode] = pattern[position]
        occupations.append(tuple(occupation))
    weights = numpy.array(weights)
    return SchmidtSpectrum(weights, tuple(occupations), float(1 - weights.sum()))


def sigma_z_from_correlation(gamma, n):
    """<s^z_n> = 2i Gamma[x_n, y_n]."""
    return float((2j * gamma[2 * n, 2 * n + 1]).real)


def zz_from_correlation(gamma, k, l):
    """Connected <s^z_k s^z_l> by Wick's theorem on the Majorana contractions."""
    xk, yk, xl, yl = 2 * k, 2 * k + 1, 2 * l, 2 * l + 1
    return float((4 * (gamma[xk, xl] * gamma[yk, yl] - gamma[xk, yl] * gamma[yk, xl])).real)


### Dense path


def density_matrix_entropy(rho):
    eigenvalues = scipy.linalg.eigvalsh(rho)
    if eigenvalues.min() < -PSD_TOL:
        raise ValueError(f"density matrix has a negative eigenvalue {eigenvalues.min():.3e}")
    return entropy_from_weights(numpy.clip(eigenvalues, 0.0, 1.0))


def dense_block_entropy(psi, sites, n_sites):
    """Entropy of `sites` for a pure state over the full 2^N basis, via its Schmidt values."""
    sites = list(sites)
    if not sites or len(sites) == n_sites:
        return 0.0
    return entropy_from_weights(dense_schmidt_weights(psi, sites, n_sites))


def dense_schmidt_weights(psi, sites, n_sites):
    sites = list(sites)
    rest = [s for s in range(n_sites) if s not in sites]
    matrix = numpy.asarray(psi).reshape([2] * n_sites).transpose(sites + rest).reshape(2 ** len(sites), -1)
    return scipy.linalg.svdvals(matrix) ** 2


def mutual_information(psi, a, b, n_sites):
    """S(A) + S(B) - S(AB) for disjoint site sets of a pure dense state."""
    a, b = list(a), list(b)
    if set(a) & set(b):
        raise ValueError(f"site sets must be disjoint, got {a} and {b}")
    return (
        dense_block_entropy(psi, a, n_sites)
        + dense_block_entropy(psi, b, n_sites)
        - dense_block_entropy(psi, a + b, n_sites)
    )


def _dense_z_moments(psi, k, l, n_sites):
    probabilities = numpy.abs(psi) ** 2
    states = numpy.arange(len(psi))
    z_k = spin_chain.spin_z(states, k, n_sites)
    z_l = spin_chain.spin_z(states, l, n_sites)
    return probabilities @ z_k, probabilities @ z_l, probabilities @ (z_k * z_l)


def _resolve_method(spec, method):
    if method not in ("auto", "fermion", "dense"):
        raise ValueError(f'method must be "auto", "fermion" or "dense", got {method!r}')
    if method == "auto":
        return "fermion" if fermion_chain.is_fermionizable(spec) else "dense"
    return method


def entropy_profile(spec, ells=None, method="auto"):
    """
    Entropies of the contiguous blocks {0, ..., ell - 1} of the ground state.

    Args:
        spec (SpinModelSpec): The chain.

        ells (iterable, optional): Block lengths, defaults to 1..N-1.

        method (str): "fermion" (free-fermion correlation matrix), "dense" (exact
        diagonalization) or "auto" (fermion whenever the spec allows it).

    Returns:
        EntropyProfile.
    """
    n = spec.n_sites
    ells = list(range(1, n)) if ells is None else list(ells)
    if any(not 0 < ell < n for ell in ells):
        raise ValueError(f"block lengths must lie in 1..{n - 1}, got {ells}")
    method = _resolve_method(spec, method)
    logger.debug(f"entropy profile of N={n} via the {method} path")
    if method == "fermion":
        gamma = fermion_chain.ground_correlation(spec)
        values = {
            ell: von_neumann_entropy(block_occupations(block_correlation(gamma, range(ell))))
            for ell in ells
        }
    else:
        psi = spin_chain.ground_state(spec).full_vector()
        values = {ell: dense_block_entropy(psi, range(ell), n) for ell in ells}
    return EntropyProfile(n, values)


def sigma_z_expectation(spec, n, method="auto"):
    if _resolve_method(spec, method) == "fermion":
        return sigma_z_from_correlation(fermion_chain.ground_correlation(spec), n)
    psi = spin_chain.ground_state(spec).full_vector()
    return float(_dense_z_moments(psi, n, n, spec.n_sites)[0])


def zz_correlation(spec, k, l, method="auto"):
    """Connected correlator <s^z_k s^z_l> - <s^z_k><s^z_l> of the ground state."""
    if _resolve_method(spec, method) == "fermion":
        return zz_from_correlation(fermion_chain.ground_correlation(spec), k, l)
    psi = spin_chain.ground_state(spec).full_vector()
    z_k, z_l, z_kl = _dense_z_moments(psi, k, l, spec.n_sites)
    return float(z_kl - z_k * z_l)


def correlation_length(spec, method="auto", reference=0):
    """
    Decay length from a least-squares fit of log|s(r)| = a - r / xi.

    Distances 2..N//2 from `reference` with |s| above CORRELATION_FLOOR enter the
    fit. With fewer than MIN_FIT_POINTS points the length is nan.

    Returns:
        CorrelationLength(xi, residual, n_points), residual being the rms fit error.
    """
    n = spec.n_sites
    if _resolve_method(spec, method) == "fermion":
        gamma = fermion_chain.ground_correlation(spec)
        correlator = lambda l: zz_from_correlation(gamma, reference, l)
    else:
        psi = spin_chain.ground_state(spec).full_vector()

        def correlator(l):
            z_k, z_l, z_kl = _dense_z_moments(psi, reference, l, n)
            return z_kl - z_k * z_l

    distances, logs = [], []
    for r in range(MIN_FIT_DISTANCE, n // 2 + 1):
        s = abs(correlator((reference + r) % n))
        if s > CORRELATION_FLOOR:
            distances.append(r)
            logs.append(math.log(s))
    if len(distances) < MIN_FIT_POINTS:
        logger.warning(f"only {len(distances)} correlator values above {CORRELATION_FLOOR}, correlation length indeterminate")
        return CorrelationLength(math.nan, math.nan, len(distances))
    slope, intercept = numpy.polyfit(distances, logs, 1)
    residual = float(numpy.sqrt(numpy.mean((numpy.polyval([slope, intercept], distances) - logs) ** 2)))
    xi = -1.0 / slope if slope < 0 else math.inf
    return CorrelationLength(float(xi), residual, len(distances))


### Two-qubit measures


def concurrence(rho):
    """Concurrence max(0, l1 - l2 - l3 - l4) of a two-qubit density matrix."""
    rho = numpy.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"concurrence needs a 4x4 density matrix, got shape {rho.shape}")
    if numpy.abs(rho - rho.conj().T).max() > PSD_TOL or abs(numpy.trace(rho) - 1) > PSD_TOL:
        raise ValueError("concurrence needs a Hermitian unit-trace matrix")
    if scipy.linalg.eigvalsh(rho).min() < -PSD_TOL:
        raise ValueError("concurrence needs a positive semidefinite matrix")
    yy = numpy.kron(spin_chain.PAULI["y"].toarray(), spin_chain.PAULI["y"].toarray())
    flipped = yy @ rho.conj() @ yy
    root = scipy.linalg.sqrtm(rho)
    values = numpy.sort(numpy.abs(scipy.linalg.eigvals(scipy.linalg.sqrtm(root @ flipped @ root))))[::-1]
    return float(max(0.0, values[0] - values[1] - values[2] - values[3]))


def eof_from_concurrence(c):
    if not -PSD_TOL <= c <= 1 + PSD_TOL:
        raise ValueError(f"concurrence must lie in [0, 1], got {c}")
    c = min(max(c, 0.0), 1.0)
    return float(binary_entropy(0.5 * (1 + math.sqrt(1 - c**2))))
