"""
Gaussian states of the periodic lattice Klein-Gordon chain.

Second moments use Q = <q q>, P = <p p>, S = <q p>_sym with the vacuum of a
single oscillator of frequency w at Q = 1 / (2 w), P = w / 2. Symplectic
eigenvalues are vacuum normalized, nu = 2 sqrt(eig(Q P)) >= 1, and a mode
with nu = cosh(2 a) carries the entropy zeta(a).
"""
import dataclasses
import logging
import math
from collections import namedtuple
from typing import Optional

import numpy
import scipy.linalg
import scipy.signal
from scipy.special import xlogy

logger = logging.getLogger(__name__)

UNCERTAINTY_TOL = 1e-9
INVALID_NU_TOL = 1e-6
TRANSLATION_TOL = 1e-10


@dataclasses.dataclass(frozen=True)
class KGSpec:
    """
    Args:
        n_sites (int): Number of oscillators on the ring.

        kappa (float): Mass, must be positive.

        lattice_const (float): Lattice spacing a.

        impurity_site (int, optional): Site l of a linear field impurity.

        impurity_strength (float): Its strength epsilon.
    """

    n_sites: int
    kappa: float
    lattice_const: float = 1.0
    impurity_site: Optional[int] = None
    impurity_strength: float = 0.0

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError(f"n_sites must be positive, got {self.n_sites}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, the massless chain has a divergent Q (got {self.kappa})")
        if not self.lattice_const > 0:
            raise ValueError(f"lattice_const must be positive, got {self.lattice_const}")
        if self.impurity_site is not None and not 0 <= self.impurity_site < self.n_sites:
            raise ValueError(f"impurity_site must lie in 0..{self.n_sites - 1}, got {self.impurity_site}")

    @property
    def momenta(self):
        return 2 * numpy.pi * numpy.arange(self.n_sites) / self.n_sites


@dataclasses.dataclass(frozen=True)
class GaussianChainState:
    Q: numpy.ndarray
    P: numpy.ndarray
    S: numpy.ndarray
    mean_q: numpy.ndarray
    mean_p: numpy.ndarray

    @property
    def n_modes(self):
        return self.Q.shape[0]

    def covariance(self):
        """Vacuum-normalized covariance over (q_1..q_n, p_1..p_n)."""
        return 2 * numpy.block([[self.Q, self.S], [self.S.T, self.P]])


@dataclasses.dataclass(frozen=True)
class TwoModeStandardForm:
    """Vacuum-normalized standard form, the vacuum being n = 1, k_q = k_p = 0."""

    n_a: float
    n_b: float
    k_q: float
    k_p: float


FieldEvolution = namedtuple("FieldEvolution", ["times", "sites", "phi", "pi"])


def zeta(x):
    """cosh^2 x log2 cosh^2 x - sinh^2 x log2 sinh^2 x."""
    c2, s2 = numpy.cosh(x) ** 2, numpy.sinh(x) ** 2
    return (xlogy(c2, c2) - xlogy(s2, s2)) / math.log(2)


def single_mode_entropy(nu):
    """Entropy in bits of a mode with vacuum-normalized symplectic eigenvalue nu."""
    a, b = (nu + 1) / 2, (nu - 1) / 2
    return (xlogy(a, a) - xlogy(b, b)) / math.log(2)


def dispersion(spec):
    k = spec.momenta
    return numpy.sqrt(4 / spec.lattice_const**2 * numpy.sin(k / 2) ** 2 + spec.kappa**2)


def kg_ground_state(spec):
    """Circulant ground-state moments Q_mn = (1/2N) sum_k cos(k(m-n)) / w_k, P_mn = (1/2N) sum_k w_k cos(k(m-n))."""
    n = spec.n_sites
    omega = dispersion(spec)
    phases = numpy.cos(numpy.outer(numpy.arange(n), spec.momenta))
    q_row = phases @ (1 / omega) / (2 * n)
    p_row = phases @ omega / (2 * n)
    zeros = numpy.zeros(n)
    return GaussianChainState(
        scipy.linalg.circulant(q_row),
        scipy.linalg.circulant(p_row),
        numpy.zeros((n, n)),
        zeros,
        zeros.copy(),
    )


def position_to_moments(A, C, d):
    """
    Moments of the Gaussian with position-basis kernel
    <q|rho|q'> ~ exp(-q^T A q / 2 - q'^T A* q' / 2 + q^T C q' + d^T q + d*^T q').

    Args:
        A (numpy.ndarray): Complex symmetric matrix.

        C (numpy.ndarray): Hermitian matrix, zero for pure states.

        d (numpy.ndarray): Complex linear coefficients.
    """
    A, C, d = numpy.asarray(A, complex), numpy.asarray(C, complex), numpy.asarray(d, complex)
    kernel = A.real - C.real
    try:
        Q = 0.5 * scipy.linalg.inv(kernel)
    except scipy.linalg.LinAlgError as err:
        raise ValueError("Re(A - C) is singular") from err
    if numpy.any(scipy.linalg.eigvalsh(0.5 * (kernel + kernel.T)) <= 0):
        raise ValueError("Re(A - C) must be positive definite")
    Q = 0.5 * (Q + Q.T)
    M = A - C
    P = (A - M @ Q @ M.T).real
    P = 0.5 * (P + P.T)
    S = -Q @ (A.imag + C.imag)
    mean_q = 2 * Q @ d.real
    mean_p = d.imag - 2 * (A.imag - C.imag) @ Q @ d.real
    return GaussianChainState(Q, P, S, mean_q, mean_p)


def symplectic_eigenvalues(covariance):
    """Symplectic eigenvalues of a 2n x 2n covariance in (q..., p...) order, ascending."""
    covariance = numpy.asarray(covariance, dtype=float)
    n = covariance.shape[0] // 2
    omega = numpy.block([[numpy.zeros((n, n)), numpy.eye(n)], [-numpy.eye(n), numpy.zeros((n, n))]])
    values = numpy.abs(scipy.linalg.eigvals(1j * omega @ covariance))
    return numpy.sort(values)[::2]


def block_symplectic_eigenvalues(state, sites):
    sites = list(sites)
    if not sites:
        raise ValueError("block must contain at least one site")
    index = numpy.ix_(sites, sites)
    Q, P, S = state.Q[index], state.P[index], state.S[index]
    if numpy.abs(S).max() > 1e-12:
        block = 2 * numpy.block([[Q, S], [S.T, P]])
        return symplectic_eigenvalues(block)
    L = scipy.linalg.cholesky(Q, lower=True)
    return numpy.sort(2 * numpy.sqrt(numpy.clip(scipy.linalg.eigvalsh(L.T @ P @ L), 0.0, None)))


def gaussian_block_entropy(state, sites):
    """von Neumann entropy of the reduced state of `sites`, in bits."""
    nu = block_symplectic_eigenvalues(state, sites)
    if nu.min() < 1 - INVALID_NU_TOL:
        raise ValueError(f"symplectic eigenvalue {nu.min():.9f} < 1, not a physical state")
    nu = numpy.maximum(nu, 1.0)
    return float(numpy.sum(zeta(numpy.arccosh(numpy.sqrt((nu + 1) / 2)))))


def two_mode_matrix(state, site_i, site_j):
    """
    Standard form of the two-site reduced state of a translation-invariant chain.

    With q0 = Q_ii, p0 = P_ii, q1 = Q_ij, p1 = P_ij and the local squeeze
    sqrt(p0 / q0): n = 2 sqrt(q0 p0), k_q = 2 q1 sqrt(p0 / q0), k_p = 2 p1 sqrt(q0 / p0).
    A local rotation and sign change bring the pair to k_q >= |k_p|.
    """
    if site_i == site_j:
        raise ValueError(f"two_mode_matrix needs two different sites, got {site_i}")
    diagonal_q, diagonal_p = numpy.diag(state.Q), numpy.diag(state.P)
    scale = max(1.0, numpy.abs(diagonal_q).max(), numpy.abs(diagonal_p).max())
    if numpy.ptp(diagonal_q) > TRANSLATION_TOL * scale or numpy.ptp(diagonal_p) > TRANSLATION_TOL * scale:
        raise ValueError("two_mode_matrix needs a translation-invariant state")
    q0, p0 = diagonal_q[site_i], diagonal_p[site_i]
    q1, p1 = state.Q[site_i, site_j], state.P[site_i, site_j]
    n = 2 * math.sqrt(q0 * p0)
    k_q = 2 * q1 * math.sqrt(p0 / q0)
    k_p = 2 * p1 * math.sqrt(q0 / p0)
    if abs(k_p) > abs(k_q):
        k_q, k_p = k_p, k_q
    if k_q < 0:
        k_q, k_p = -k_q, -k_p
    return TwoModeStandardForm(n, n, k_q, k_p)


def symmetric_gaussian_eof(form):
    """
    Entanglement of formation of a symmetric two-mode state, in bits.

    The state is entangled iff (n - k_q)(n + k_p) < 1; then E = zeta(|ln[(n - k_q)(n + k_p)]| / 2).
    """
    if abs(form.n_a - form.n_b) > 1e-12 * max(1.0, form.n_a):
        raise ValueError(f"state is not symmetric: n_a={form.n_a}, n_b={form.n_b}")
    n, k_q, k_p = form.n_a, form.k_q, form.k_p
    if (n - k_q) * (n - k_p) < 1 - UNCERTAINTY_TOL or (n + k_q) * (n + k_p) < 1 - UNCERTAINTY_TOL:
        raise ValueError(f"(n, k_q, k_p) = ({n}, {k_q}, {k_p}) violates the uncertainty bound")
    product = (n - k_q) * (n + k_p)
    if product <= 0:
        raise ValueError(f"(n - k_q)(n + k_p) = {product} must be positive")
    if product >= 1:
        return 0.0
    return float(zeta(abs(0.5 * math.log(product))))


### Impurity dynamics


def impurity_field_evolution(spec, times, sites=None):
    """
    Mean field and momentum after switching on a linear impurity at site l at t = 0.

    phi_n(t) = (eps / N) sum_k w_k^-2 [cos k(n - l) - cos(w_k t - k(n - l))],
    pi_n(t) = (eps / N) sum_k w_k^-1 sin(w_k t - k(n - l)).

    Returns:
        FieldEvolution with phi and pi of shape (len(times), len(sites)).
    """
    if spec.impurity_site is None:
        raise ValueError("impurity_field_evolution needs a spec with an impurity_site")
    times = numpy.atleast_1d(numpy.asarray(times, dtype=float))
    sites = numpy.arange(spec.n_sites) if sites is None else numpy.asarray(list(sites))
    omega = dispersion(spec)
    k = spec.momenta
    prefactor = spec.impurity_strength / spec.n_sites
    shifts = numpy.outer(sites - spec.impurity_site, k)
    phases = omega[None, None, :] * times[:, None, None] - shifts[None, :, :]
    phi = prefactor * (numpy.cos(shifts) @ omega**-2 - numpy.cos(phases) @ omega**-2)
    pi = prefactor * (numpy.sin(phases) @ omega**-1)
    return FieldEvolution(times, sites, phi, pi)


def constant_term_sum(spec):
    """Time-averaged field at the impurity site, (eps / N) sum_k w_k^-2."""
    return spec.impurity_strength / spec.n_sites * float(numpy.sum(dispersion(spec) ** -2))


def constant_term_closed_form(kappa, lattice_const=1.0, epsilon=1.0):
    """Infinite-chain limit eps a / (kappa sqrt(4 + kappa^2 a^2)) of constant_term_sum."""
    return epsilon * lattice_const / (kappa * math.sqrt(4 + kappa**2 * lattice_const**2))


def oscillation_period(times, values, prominence=0.5):
    """
    Median spacing between the peaks of a sampled signal.

    Only peaks whose prominence exceeds `prominence` times the peak-to-peak
    range count, so ripples of the faster modes are skipped.
    """
    values = numpy.asarray(values, dtype=float)
    peaks, _ = scipy.signal.find_peaks(values, prominence=prominence * numpy.ptp(values))
    if len(peaks) < 2:
        raise ValueError(f"found {len(peaks)} peak(s), need at least 2 to measure a period")
    return float(numpy.median(numpy.diff(numpy.asarray(times)[peaks])))
