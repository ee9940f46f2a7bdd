"""
Free-fermion solution of XY-type chains.

The Jordan-Wigner string runs over the sites to the left, a_n = (prod_{j<n} s^z_j) s^+_n,
and the Majorana pair of mode n is x_n = (a_n - a_n^dag) / (i sqrt 2),
y_n = (a_n + a_n^dag) / sqrt 2, stored in the order x_0, y_0, x_1, y_1, ...
With this ordering H = sum_ij C_ij g_i g_j and, after the orthogonal change
g' = O^T g, H = sum_k w_k (2 n_k - 1).
"""
import dataclasses
import logging
from collections import namedtuple
from functools import reduce

import numpy
import scipy.linalg

from spin_chain import PAULI

logger = logging.getLogger(__name__)

ZERO_MODE_TOL = 1e-10
SYMMETRY_TOL = 1e-14
PARITY_TIE_TOL = 1e-12


class NotFermionizableError(ValueError):
    """Raised for specs with zz or Dzyaloshinskii couplings."""


@dataclasses.dataclass(frozen=True)
class QuadraticFermionForm:
    """
    H = sum_mn [a_m^dag A_mn a_n + (a_m^dag B_mn a_n^dag + h.c.) / 2] up to a constant.

    parity_sector is +1 or -1 for the two boundary sectors of a periodic chain
    and 0 for open boundaries.
    """

    A: numpy.ndarray
    B: numpy.ndarray
    parity_sector: int

    def __post_init__(self):
        if self.A.shape != self.B.shape or self.A.shape[0] != self.A.shape[1]:
            raise ValueError(f"A and B must be square and of equal shape, got {self.A.shape} and {self.B.shape}")
        if self.parity_sector not in (1, -1, 0):
            raise ValueError(f"parity_sector must be +1, -1 or 0, got {self.parity_sector}")
        if numpy.abs(self.A - self.A.T).max() > SYMMETRY_TOL:
            raise ValueError("A must be symmetric")
        if numpy.abs(self.B + self.B.T).max() > SYMMETRY_TOL:
            raise ValueError("B must be antisymmetric")

    @property
    def n_modes(self):
        return self.A.shape[0]


@dataclasses.dataclass(frozen=True)
class MajoranaForm:
    C: numpy.ndarray

    @property
    def n_modes(self):
        return self.C.shape[0] // 2


@dataclasses.dataclass(frozen=True)
class DiagonalizedChain:
    """
    Orthogonal block diagonalization O^T C O = sum_k [[0, -i w_k], [i w_k, 0]].

    Args:
        omega_bar (numpy.ndarray): Ascending nonnegative mode energies.

        O (numpy.ndarray): Real orthogonal 2N x 2N matrix, columns (x'_k, y'_k) per mode.

        Sigma, Delta (numpy.ndarray): Bogoliubov matrices, b_k = sum_n Sigma_kn a_n + Delta_kn a_n^dag.

        zero_modes (int): Number of modes with w_k below ZERO_MODE_TOL.
    """

    omega_bar: numpy.ndarray
    O: numpy.ndarray
    Sigma: numpy.ndarray
    Delta: numpy.ndarray
    zero_modes: int = 0

    @property
    def n_modes(self):
        return len(self.omega_bar)

    @property
    def ground_energy(self):
        return -float(numpy.sum(self.omega_bar))

    @property
    def vacuum_parity(self):
        """Fermion parity of the quasi-particle vacuum, equal to det(O)."""
        return int(round(numpy.linalg.det(self.O)))


ChainSolution = namedtuple("ChainSolution", ["parity", "energy", "chain", "majorana", "occupied"])
BogoliubovAngles = namedtuple("BogoliubovAngles", ["theta", "residual"])


def is_fermionizable(spec):
    return spec.f[2] == 0 and not any(spec.g) and spec.field[0] == 0 and spec.field[1] == 0


def jordan_wigner(spec, parity_sector=0):
    """
    Quadratic fermion form of an XY-family chain.

    Args:
        spec (SpinModelSpec): Chain with f_z = 0, g = 0 and a z field only.

        parity_sector (int): +1 or -1 selects the boundary sector of a periodic chain,
        0 gives the open chain. Open specs always give the open form.

    Returns:
        QuadraticFermionForm.
    """
    if not is_fermionizable(spec):
        raise NotFermionizableError(
            f"spec with f={spec.f}, g={spec.g}, field={spec.field} has no free-fermion form; "
            "solve it with spin_chain.ground_state instead"
        )
    if parity_sector not in (1, -1, 0):
        raise ValueError(f"parity_sector must be +1, -1 or 0, got {parity_sector}")
    if spec.boundary == "open":
        parity_sector = 0
    n = spec.n_sites
    A = numpy.diag([spec.site_field(site)[2] for site in range(n)]).astype(float)
    B = numpy.zeros((n, n))
    for bond in range(n - 1):
        f_x, f_y, _ = spec.bond_couplings(bond)
        A[bond, bond + 1] += -(f_x + f_y) / 2
        A[bond + 1, bond] += -(f_x + f_y) / 2
        B[bond, bond + 1] += -(f_x - f_y) / 2
        B[bond + 1, bond] += (f_x - f_y) / 2
    if parity_sector:
        f_x, f_y, _ = spec.bond_couplings(n - 1)
        A[0, n - 1] += parity_sector * (f_x + f_y) / 2
        A[n - 1, 0] += parity_sector * (f_x + f_y) / 2
        B[0, n - 1] += -parity_sector * (f_x - f_y) / 2
        B[n - 1, 0] += parity_sector * (f_x - f_y) / 2
    return QuadraticFermionForm(A, B, parity_sector)


def majorana_form(q):
    """Majorana matrix with blocks C[x_m, y_n] = -i (A+B)_mn and C[y_m, x_n] = i (A-B)_mn."""
    if numpy.iscomplexobj(q.B) and numpy.abs(q.B.imag).max() > 0:
        raise ValueError("complex pairing amplitudes are not supported by majorana_form")
    A, B = numpy.real(q.A), numpy.real(q.B)
    n = q.n_modes
    C = numpy.zeros((2 * n, 2 * n), dtype=complex)
    C[0::2, 1::2] = -1j * (A + B)
    C[1::2, 0::2] = 1j * (A - B)
    return MajoranaForm(C)


def bogoliubov_matrices(O):
    n = O.shape[0] // 2
    Oxx, Oxy = O[0::2, 0::2], O[0::2, 1::2]
    Oyx, Oyy = O[1::2, 0::2], O[1::2, 1::2]
    Sigma = 0.5 * (Oyy + 1j * Oyx - 1j * Oxy + Oxx).T
    Delta = 0.5 * (Oyy + 1j * Oyx + 1j * Oxy - Oxx).T
    assert Sigma.shape == (n, n)
    return Sigma, Delta


def diagonalize_majorana(m):
    """
    Real orthogonal block diagonalization of a Majorana matrix.

    Each eigenvector v of C with eigenvalue w > 0 gives the column pair
    (sqrt 2 Re v, sqrt 2 Im v). Zero modes are paired from an orthonormal basis
    of their real span. Pairs are ordered by ascending w and each pair's sign is
    fixed so that the first nonzero entry of its first column is positive.

    Returns:
        DiagonalizedChain.
    """
    C = m.C
    n = m.n_modes
    if numpy.abs(C - C.conj().T).max() > 1e-12:
        raise ValueError("Majorana matrix must be Hermitian")
    if numpy.abs(C.real).max() > 1e-12:
        raise ValueError("Majorana matrix must be purely imaginary")
    energies, vectors = scipy.linalg.eigh(C)
    zero = numpy.abs(energies) <= ZERO_MODE_TOL
    positive = energies > ZERO_MODE_TOL
    n_zero = int(numpy.sum(zero))
    if n_zero % 2 or n_zero // 2 + int(numpy.sum(positive)) != n:
        raise ValueError(f"spectrum of C is not paired: {n_zero} zero and {numpy.sum(positive)} positive eigenvalues")

    omegas, columns = [], []
    if n_zero:
        logger.warning(f"{n_zero // 2} zero mode(s) in a chain of {n} modes")
        # C = i K with K real antisymmetric, so the kernel of C is the real kernel of K
        _, _, vh = scipy.linalg.svd(C.imag)
        span = vh[-n_zero:].T
        for k in range(0, n_zero, 2):
            omegas.append(0.0)
            columns.append((span[:, k], span[:, k + 1]))
    for energy, vector in zip(energies[positive], vectors[:, positive].T):
        omegas.append(float(energy))
        columns.append((numpy.sqrt(2) * vector.real, numpy.sqrt(2) * vector.imag))

    O = numpy.zeros((2 * n, 2 * n))
    for k, (u, w) in enumerate(columns):
        lead = u[numpy.abs(u) > 1e-12]
        if len(lead) and lead[0] < 0:
            u, w = -u, -w
        O[:, 2 * k], O[:, 2 * k + 1] = u, w
    Sigma, Delta = bogoliubov_matrices(O)
    return DiagonalizedChain(numpy.array(omegas), O, Sigma, Delta, n_zero // 2)


def unitarity_residuals(d):
    """Max-norm residuals of the four Bogoliubov unitarity conditions."""
    S, D = d.Sigma, d.Delta
    eye = numpy.eye(d.n_modes)
    return (
        numpy.abs(S @ S.conj().T + D @ D.conj().T - eye).max(),
        numpy.abs(S.conj().T @ S + D.T @ D.conj() - eye).max(),
        numpy.abs(S @ D.T + D @ S.T).max(),
        numpy.abs(S.conj().T @ D + D.T @ S.conj()).max(),
    )


def bogoliubov_angles(d):
    """
    Mixing angles from the simultaneous diagonalization of Sigma Sigma^dag and Delta Delta^dag.

    Sigma Sigma^dag + Delta Delta^dag = 1, so both share the eigenbasis U of the
    first and the angles follow from cos^2 theta_k. The residual measures how far
    U^dag Delta Delta^dag U is from diagonal.
    """
    cos2, U = scipy.linalg.eigh(d.Sigma @ d.Sigma.conj().T)
    rotated = U.conj().T @ (d.Delta @ d.Delta.conj().T) @ U
    residual = numpy.abs(rotated - numpy.diag(numpy.diag(rotated))).max()
    theta = numpy.arccos(numpy.sqrt(numpy.clip(cos2, 0.0, 1.0)))
    return BogoliubovAngles(theta, float(residual))


def analytic_xy_spectrum(n_sites, lam, gamma, parity):
    """
    Closed-form mode energies sqrt((lam - cos a_k)^2 + gamma^2 sin^2 a_k) of the uniform chain.

    a_k = pi (2k + 1) / N for parity +1 and 2 pi k / N for parity -1; returned in k order.
    """
    k = numpy.arange(n_sites)
    if parity == 1:
        alpha = numpy.pi * (2 * k + 1) / n_sites
    elif parity == -1:
        alpha = 2 * numpy.pi * k / n_sites
    else:
        raise ValueError(f"parity must be +1 or -1, got {parity}")
    return numpy.sqrt((lam - numpy.cos(alpha)) ** 2 + gamma**2 * numpy.sin(alpha) ** 2)


def correlation_matrix(d, occupied=()):
    """
    Gamma_ij = <g_i g_j> - delta_ij / 2 of a quasi-particle eigenstate.

    Empty modes contribute (i/2)(y' x'^T - x' y'^T), occupied modes the opposite sign
    and zero modes nothing (maximally mixed).
    """
    signs = numpy.ones(d.n_modes)
    signs[list(occupied)] = -1.0
    signs[: d.zero_modes] = 0.0
    X, Y = d.O[:, 0::2], d.O[:, 1::2]
    Xs = X * signs
    return 0.5j * (Y @ Xs.T - Xs @ Y.T)


def solve_chain(spec):
    """
    Exact ground state of a fermionizable chain.

    A periodic chain is solved in both boundary sectors. A sector whose vacuum
    has the wrong fermion parity gets its lowest mode occupied. The lower energy
    wins, ties go to parity +1.

    Returns:
        ChainSolution(parity, energy, chain, majorana, occupied).
    """
    if spec.boundary == "open":
        m = majorana_form(jordan_wigner(spec, 0))
        d = diagonalize_majorana(m)
        return ChainSolution(0, d.ground_energy, d, m, ())
    best = None
    for sector in (1, -1):
        m = majorana_form(jordan_wigner(spec, sector))
        d = diagonalize_majorana(m)
        occupied = ()
        energy = d.ground_energy
        if not d.zero_modes and d.vacuum_parity != sector:
            occupied = (0,)
            energy += 2 * d.omega_bar[0]
        logger.debug(f"sector {sector:+d}: energy {energy:.12f}, vacuum parity {d.vacuum_parity:+d}")
        if best is None or energy < best.energy - PARITY_TIE_TOL * max(1.0, abs(energy)):
            best = ChainSolution(sector, energy, d, m, occupied)
    return best


def ground_correlation(spec):
    """Majorana correlation matrix of the exact ground state of a fermionizable chain."""
    solution = solve_chain(spec)
    return correlation_matrix(solution.chain, solution.occupied)


def ground_state_parity(spec):
    if spec.boundary != "periodic":
        raise ValueError("ground_state_parity needs a periodic chain")
    if spec.n_sites % 2:
        raise ValueError(f"ground_state_parity needs an even number of sites, got {spec.n_sites}")
    return solve_chain(spec).parity


def energy_gap(spec):
    """
    Smallest mode energy in the ground-state parity sector.

    The single quasi-particle excitation costs twice this value.
    """
    return float(solve_chain(spec).chain.omega_bar.min())


def majorana_operators(n_modes):
    """Dense 2^N x 2^N Majorana operators x_0, y_0, x_1, y_1, ... in the spin basis."""
    identity = numpy.eye(2)
    z = PAULI["z"].toarray()
    sigma_plus = numpy.array([[0, 1], [0, 0]], dtype=complex)
    ops = []
    for m in range(n_modes):
        factors = [z] * m + [sigma_plus] + [identity] * (n_modes - m - 1)
        a = reduce(numpy.kron, factors)
        ops.append((a - a.conj().T) / (1j * numpy.sqrt(2)))
        ops.append((a + a.conj().T) / numpy.sqrt(2))
    return ops
