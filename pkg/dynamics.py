"""
Quench dynamics of free-fermion chains and comparison with thermal states.

Majorana operators evolve as g(t) = T(t) g with T(t) = exp(-2i C t), so the
correlation matrix evolves as Gamma(t) = T Gamma T^T.
"""
import dataclasses
import logging
import math
from collections import namedtuple

import numpy
import scipy.linalg
import scipy.optimize
from scipy.special import expit

import entanglement
import fermion_chain
import spin_chain

logger = logging.getLogger(__name__)

BETA_BOUNDS = (1e-3, 1e3)
BETA_GRID = 121
BETA_XATOL = 1e-5  # In log(beta), about 1e-5 relative
DENSE_BLOCK_CAP = 12
BRANCH_TOL = 1e-12


class BranchCutError(ArithmeticError):
    """Raised when a matrix logarithm would cross the negative real axis."""


@dataclasses.dataclass(frozen=True)
class EvolutionMatrix:
    T: numpy.ndarray
    t: float
    S: numpy.ndarray
    xi: numpy.ndarray


@dataclasses.dataclass(frozen=True)
class ThermalSpectrum:
    beta: float
    weights: numpy.ndarray


TemperatureFit = namedtuple("TemperatureFit", ["beta", "fidelity"])
QuenchSample = namedtuple(
    "QuenchSample", ["t", "block_entropy", "fidelity_at_beta_star", "beta_star", "total_entropy", "energy"]
)


def _generator(C):
    return C.C if isinstance(C, fermion_chain.MajoranaForm) else numpy.asarray(C)


def evolution_basis(C):
    """Eigen-decomposition (S, xi) of the generator, computed once per quench."""
    xi, S = scipy.linalg.eigh(_generator(C))
    return S, xi


def evolution_matrix(C, t, basis=None):
    """T(t) = S diag(exp(-2i xi t)) S^dag."""
    S, xi = evolution_basis(C) if basis is None else basis
    T = (S * numpy.exp(-2j * xi * t)) @ S.conj().T
    return EvolutionMatrix(T, t, S, xi)


def evolve_correlation(gamma0, T):
    matrix = T.T if isinstance(T, EvolutionMatrix) else numpy.asarray(T)
    if matrix.shape != gamma0.shape:
        raise ValueError(f"shape mismatch: Gamma {gamma0.shape}, T {matrix.shape}")
    return matrix @ gamma0 @ matrix.T


def energy_expectation(C, gamma):
    """<H> = sum_ij C_ij Gamma_ij."""
    return float(numpy.sum(_generator(C) * gamma).real)


### Thermal spectra


def product_weights(occupations):
    """All 2^n weights prod_k [f_k or (1 - f_k)], descending."""
    weights = numpy.ones(1)
    for f in occupations:
        weights = numpy.concatenate([weights * (1 - f), weights * f])
    return numpy.sort(weights)[::-1]


def thermal_spectrum_function(block_spec, method="auto", dense_cap=DENSE_BLOCK_CAP):
    """
    Callable beta -> descending eigenvalues of exp(-beta H) / Z of a block.

    The fermion path needs an open chain (thermal occupations 1 / (1 + e^{2 beta w_k})),
    the dense path exponentiates the full block spectrum.
    """
    if method not in ("auto", "fermion", "dense"):
        raise ValueError(f'method must be "auto", "fermion" or "dense", got {method!r}')
    if method == "auto":
        fermionic = fermion_chain.is_fermionizable(block_spec) and block_spec.boundary == "open"
        method = "fermion" if fermionic else "dense"
    if method == "fermion":
        if block_spec.boundary != "open":
            raise ValueError("the fermion path of thermal spectra needs an open block")
        omega = fermion_chain.solve_chain(block_spec).chain.omega_bar

        def spectrum(beta):
            return product_weights(expit(-2 * beta * omega))

        return spectrum

    if block_spec.n_sites > dense_cap:
        raise spin_chain.SizeCapError(f"dense thermal spectrum for N={block_spec.n_sites}, the cap is N={dense_cap}")
    energies = scipy.linalg.eigvalsh(spin_chain.build_full_hamiltonian(block_spec).toarray())

    def spectrum(beta):
        weights = numpy.exp(-beta * (energies - energies[0]))
        return numpy.sort(weights / weights.sum())[::-1]

    return spectrum


def thermal_block_spectrum(block_spec, beta, method="auto"):
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    return ThermalSpectrum(beta, thermal_spectrum_function(block_spec, method)(beta))


def classical_fidelity(p, q):
    """sum_k sqrt(p_k q_k) over both spectra sorted descending and zero padded."""
    p, q = numpy.asarray(p, dtype=float), numpy.asarray(q, dtype=float)
    for name, weights in (("p", p), ("q", q)):
        if weights.min() < -1e-12:
            raise ValueError(f"{name} has a negative weight {weights.min():.3e}")
        if abs(weights.sum() - 1) > 1e-9:
            raise ValueError(f"{name} is not normalized, sum = {weights.sum()}")
    size = max(len(p), len(q))
    p = numpy.sort(numpy.pad(numpy.clip(p, 0, None), (0, size - len(p))))[::-1]
    q = numpy.sort(numpy.pad(numpy.clip(q, 0, None), (0, size - len(q))))[::-1]
    return float(numpy.sum(numpy.sqrt(p * q)))


def fit_temperature(spectrum, block_spec, bounds=BETA_BOUNDS, method="auto", thermal=None):
    """
    Inverse temperature whose thermal block spectrum best matches `spectrum`.

    A log-spaced grid over `bounds` brackets the best fidelity, which is then
    refined by a bounded scalar search in log(beta).

    Args:
        thermal (callable, optional): A prepared thermal_spectrum_function of block_spec.

    Returns:
        TemperatureFit(beta, fidelity).
    """
    thermal = thermal or thermal_spectrum_function(block_spec, method)
    spectrum = numpy.asarray(spectrum, dtype=float)

    def infidelity(log_beta):
        return -classical_fidelity(spectrum, thermal(math.exp(log_beta)))

    grid = numpy.linspace(math.log(bounds[0]), math.log(bounds[1]), BETA_GRID)
    values = numpy.array([infidelity(x) for x in grid])
    best = int(numpy.argmin(values))
    if best == len(grid) - 1:
        logger.warning(f"best fitting beta at the upper bound {bounds[1]}, the spectrum is close to the ground state")
    elif best == 0:
        logger.warning(f"best fitting beta at the lower bound {bounds[0]}")
    lower, upper = grid[max(best - 1, 0)], grid[min(best + 1, len(grid) - 1)]
    result = scipy.optimize.minimize_scalar(
        infidelity, bounds=(lower, upper), method="bounded", options={"xatol": BETA_XATOL}
    )
    log_beta, value = (result.x, result.fun) if result.fun <= values[best] else (grid[best], values[best])
    return TemperatureFit(float(math.exp(log_beta)), float(-value))


### Gaussian fermionic fidelity


def _half_exponents(W):
    """Positive halves w_k of the +-w_k eigenvalue pairs of a Hermitian antisymmetric exponent."""
    values = scipy.linalg.eigvalsh(0.5 * (W + W.conj().T))
    return values[len(values) // 2 :]


def _log_trace(W):
    """log tr exp(-g^T W g) = sum_k log(2 cosh w_k)."""
    w = _half_exponents(W)
    return float(numpy.sum(numpy.logaddexp(w, -w)))


def gaussian_spectrum(W):
    """Descending eigenvalues of exp(-g^T W g) / Z."""
    w = _half_exponents(W)
    return product_weights(expit(-2 * w))


def thermal_exponent(C, beta):
    """Exponent W of exp(-beta H) written as exp(-g^T W g)."""
    return beta * _generator(C)


def gaussian_fermionic_fidelity(rho_exponent, sigma_exponent):
    """
    Fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)) of rho ~ exp(-g^T W_rho g) and sigma ~ exp(-g^T W_sigma g).

    Products of such operators follow the products of the matrices exp(2W), so
    sqrt(rho) sigma sqrt(rho) has the exponent W_3 = log(e^{W_rho} e^{2 W_sigma} e^{W_rho}) / 2,
    and F = prod 2cosh(w3_k / 2) / sqrt(prod 2cosh(w_rho_k) prod 2cosh(w_sigma_k)).
    """
    W_rho, W_sigma = numpy.asarray(rho_exponent), numpy.asarray(sigma_exponent)
    if W_rho.shape != W_sigma.shape:
        raise ValueError(f"exponent shapes differ: {W_rho.shape} and {W_sigma.shape}")
    half = scipy.linalg.expm(W_rho)
    product = half @ scipy.linalg.expm(2 * W_sigma) @ half
    eigenvalues = scipy.linalg.eigvals(product)
    on_cut = (eigenvalues.real <= 0) & (numpy.abs(eigenvalues.imag) <= BRANCH_TOL * numpy.abs(eigenvalues).max())
    if numpy.any(on_cut):
        raise BranchCutError("exponent product has eigenvalues on the negative real axis")
    W3 = 0.5 * scipy.linalg.logm(product)
    log_fidelity = _log_trace(W3 / 2) - 0.5 * _log_trace(W_rho) - 0.5 * _log_trace(W_sigma)
    return float(math.exp(log_fidelity))


### Quench protocol


class QuenchProtocol:
    """
    Impurity quench of a periodic XY chain, prepared once and sampled at any time.

    The initial state is the ground state of the homogeneous chain; it evolves
    under the same chain with the field lam + impurity_strength on impurity_site.
    Evolution conserves fermion parity, so the generator is taken in the parity
    sector of the initial state. At each time the block spectrum is fitted to a
    thermal state of the open block.

    Args:
        block_start (int, optional): First block site, defaults to the site after the impurity.

        block_size (int): Number of adjacent block sites; the block may not wrap around the ring.
    """

    def __init__(self, n_sites, lam=1.0, impurity_strength=0.5, impurity_site=0, block_start=None, block_size=8, gamma=1.0):
        block_start = (impurity_site + 1) % n_sites if block_start is None else block_start
        if block_size < 1 or block_start < 0 or block_start + block_size > n_sites:
            raise ValueError(
                f"block of {block_size} sites starting at {block_start} does not fit in 0..{n_sites - 1} without wrapping"
            )
        self.block = list(range(block_start, block_start + block_size))
        homogeneous = spin_chain.xy_spec(n_sites, gamma, lam)
        lambdas = [lam] * n_sites
        lambdas[impurity_site] = lam + impurity_strength
        perturbed = spin_chain.xy_spec(n_sites, gamma, lam, lambdas=lambdas)

        initial = fermion_chain.solve_chain(homogeneous)
        self.gamma0 = fermion_chain.correlation_matrix(initial.chain, initial.occupied)
        self.generator = fermion_chain.majorana_form(fermion_chain.jordan_wigner(perturbed, initial.parity))
        self.basis = evolution_basis(self.generator)
        self.block_spec = spin_chain.xy_spec(block_size, gamma, lam, boundary="open")
        self.thermal = thermal_spectrum_function(self.block_spec)

    def sample(self, t):
        gamma_t = evolve_correlation(self.gamma0, evolution_matrix(self.generator, t, self.basis))
        occupations = entanglement.block_occupations(entanglement.block_correlation(gamma_t, self.block))
        full = entanglement.block_occupations(gamma_t)
        fit = fit_temperature(product_weights(occupations.lambdas), self.block_spec, thermal=self.thermal)
        sample = QuenchSample(
            float(t),
            entanglement.von_neumann_entropy(occupations),
            fit.fidelity,
            fit.beta,
            entanglement.von_neumann_entropy(full),
            energy_expectation(self.generator, gamma_t),
        )
        logger.debug(f"t={t}: S={sample.block_entropy:.6f}, F={fit.fidelity:.6f} at beta={fit.beta:.4f}")
        return sample


def quench_run(n_sites, lam=1.0, impurity_strength=0.5, impurity_site=0, block_start=None, block_size=8, times=(0.0,), gamma=1.0):
    """
    QuenchProtocol sampled at every time.

    Returns:
        list of QuenchSample.
    """
    protocol = QuenchProtocol(n_sites, lam, impurity_strength, impurity_site, block_start, block_size, gamma)
    return [protocol.sample(t) for t in times]
