"""
Central-charge estimation from entropy profiles and critical-point scans.

The conformal signature of a ring of N sites is s_l(c) = (c / 3) log2 sin(pi l / N).
Profiles are compared to it after subtracting their midpoint value, over the
window 0.2 N < l < 0.8 N.
"""
import dataclasses
import logging
import math
from collections import namedtuple
from typing import Dict, List, Optional, Tuple

import nevergrad
import numpy

import entanglement
import spin_chain

logger = logging.getLogger(__name__)

KAC_M_MAX = 12
MIN_SCAN_POINTS = 5
MIN_PEAK_CHARGE = 0.05  # Maxima below this c_est are treated as noise of a non-critical line


@dataclasses.dataclass(frozen=True)
class CriticalSignature:
    c: float
    n_sites: int

    def __call__(self, ell):
        return critical_signature(self.c, ell, self.n_sites)


@dataclasses.dataclass(frozen=True)
class CEstimate:
    c_est: float
    epsilon: float
    window: Tuple[int, int]
    n_points: int


@dataclasses.dataclass(frozen=True)
class KacTable:
    charges: Dict[int, float]
    boson: float = 1.0

    def allowed(self):
        """(charge, label) pairs, label m for a minimal model and "boson" for c = 1."""
        return [(c, m) for m, c in sorted(self.charges.items())] + [(self.boson, "boson")]


KacMatch = namedtuple("KacMatch", ["charge", "m", "distance"])
ScanPoint = namedtuple("ScanPoint", ["theta", "c_est", "epsilon", "error"])
Maximum = namedtuple("Maximum", ["theta", "c_est", "refined_theta", "refined_c", "charge", "m", "reliable"])
LineScan = namedtuple("LineScan", ["points", "maxima"])
CriticalSearch = namedtuple("CriticalSearch", ["theta", "c_est", "history"])
SurfaceRow = namedtuple("SurfaceRow", ["outer", "inner_at_max", "c_max", "error"])


def critical_signature(c, ell, n_sites):
    if not 0 < ell < n_sites:
        raise ValueError(f"the signature diverges outside 0 < l < N, got l={ell} for N={n_sites}")
    return c / 3 * math.log2(math.sin(math.pi * ell / n_sites))


def fit_window(n_sites):
    """Block lengths strictly inside (0.2 N, 0.8 N)."""
    if n_sites < 5:
        raise ValueError(f"the fit window is empty for N={n_sites} < 5")
    return [ell for ell in range(1, n_sites) if 0.2 * n_sites < ell < 0.8 * n_sites]


def midpoint(values, n_sites):
    """Value at l = N / 2, or the mean of the two central block lengths for odd N."""
    try:
        if n_sites % 2 == 0:
            return values[n_sites // 2]
        return 0.5 * (values[n_sites // 2] + values[n_sites // 2 + 1])
    except KeyError as err:
        raise ValueError(f"profile of N={n_sites} lacks its midpoint block length {err}") from err


def _window_data(profile):
    """
    Window, d_l = S_l - S_mid and t_l = s_l(1) - s_mid(1) of a profile.

    S_mid is S at l = N / 2, or the mean of the two central lengths for odd N.
    The signature is shifted by its own midpoint value so that both sides are
    measured from the same reference. The shift is zero for even N, where
    s_{N/2} vanishes; for odd N it keeps an exact profile c s_l + const at c_est = c.
    """
    window = fit_window(profile.n_sites)
    missing = [ell for ell in window if ell not in profile.values]
    if missing:
        raise ValueError(f"profile does not cover the fit window, missing l={missing}")
    n = profile.n_sites
    reference = midpoint(profile.values, n)
    deltas = numpy.array([profile[ell] - reference for ell in window])
    signature = {ell: critical_signature(1.0, ell, n) for ell in range(1, n)}
    offset = midpoint(signature, n)
    t = numpy.array([signature[ell] - offset for ell in window])
    return window, deltas, t


def fit_error(profile, c):
    """Mean squared deviation of the midpoint-subtracted profile from s_l(c) over the window."""
    _, deltas, t = _window_data(profile)
    return float(numpy.mean((deltas - c * t) ** 2))


def estimate_central_charge(profile):
    """
    Least-squares central charge c_est = sum d_l t_l / sum t_l^2.

    Returns:
        CEstimate with the fit error at c_est.
    """
    window, deltas, t = _window_data(profile)
    norm = float(numpy.sum(t**2))
    if norm == 0:
        raise ValueError(f"degenerate fit window {window} for N={profile.n_sites}")
    c_est = float(numpy.sum(deltas * t) / norm)
    epsilon = float(numpy.mean((deltas - c_est * t) ** 2))
    logger.debug(f"c_est={c_est:.6f} over l={window[0]}..{window[-1]}")
    return CEstimate(c_est, epsilon, (window[0], window[-1]), len(window))


### Kac table


def kac_charge(m):
    return 1 - 6 / (m * (m + 1))


def kac_charges(m_max=KAC_M_MAX):
    if m_max < 3:
        raise ValueError(f"m_max must be at least 3, got {m_max}")
    return KacTable({m: kac_charge(m) for m in range(3, m_max + 1)})


def snap_to_kac(c_est, m_max=KAC_M_MAX):
    """Nearest allowed charge; ties go to the smaller m."""
    charge, label = min(kac_charges(m_max).allowed(), key=lambda item: abs(item[0] - c_est))
    return KacMatch(charge, label, abs(charge - c_est))


def kac_weight(m, r, s):
    if m < 3:
        raise ValueError(f"m must be at least 3, got {m}")
    if not (1 <= r <= m - 1 and 1 <= s <= m):
        raise ValueError(f"(r, s) = ({r}, {s}) outside 1 <= r <= {m - 1}, 1 <= s <= {m}")
    return (((m + 1) * r - m * s) ** 2 - 1) / (4 * m * (m + 1))


def kac_weights(m):
    """Matrix h[r - 1, s - 1] of conformal weights of the m-th minimal model."""
    return numpy.array([[kac_weight(m, r, s) for s in range(1, m + 1)] for r in range(1, m)])


### Scans


@dataclasses.dataclass(frozen=True)
class ModelFamily:
    """
    A one-parameter line through a model family.

    Args:
        model (str): "ising", "xx", "xy" or "xyz".

        parameter (str): Scanned parameter, "lam", "gamma" or "delta".

        fixed (dict): Values of the other parameters.
    """

    model: str
    parameter: str = "lam"
    fixed: Dict[str, float] = dataclasses.field(default_factory=dict)
    boundary: str = "periodic"

    def __post_init__(self):
        if self.model not in spin_chain.MODELS:
            raise ValueError(f"unknown model {self.model!r}, expected one of {', '.join(spin_chain.MODELS)}")
        if self.parameter not in ("lam", "gamma", "delta"):
            raise ValueError(f'parameter must be "lam", "gamma" or "delta", got {self.parameter!r}')

    def spec(self, n_sites, value):
        params = dict(self.fixed)
        params[self.parameter] = value
        return spin_chain.model_spec(self.model, n_sites, boundary=self.boundary, **params)

    def with_fixed(self, **values):
        return dataclasses.replace(self, fixed={**self.fixed, **values})


def central_charge_at(family, value, n_sites, method="auto"):
    profile = entanglement.entropy_profile(family.spec(n_sites, value), method=method)
    return estimate_central_charge(profile)


def _parabola_vertex(xs, ys):
    (x0, x1, x2), (y0, y1, y2) = xs, ys
    denominator = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denominator
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denominator
    if a >= 0:
        return x1, y1
    c = y0 - a * x0**2 - b * x0
    vertex = -b / (2 * a)
    return vertex, a * vertex**2 + b * vertex + c


def find_maxima(thetas, values, m_max=KAC_M_MAX, min_charge=MIN_PEAK_CHARGE):
    """
    Local maxima of c_est along a scan.

    Interior maxima are refined by a parabola through the three neighbouring
    points; on plateaus the lowest parameter wins. A maximum at either end of
    the path is reported but marked unreliable.
    """
    values = numpy.where(numpy.isnan(values), -numpy.inf, values)
    maxima = []
    last = len(values) - 1
    for i, value in enumerate(values):
        if not numpy.isfinite(value) or value < min_charge:
            continue
        left = values[i - 1] if i > 0 else -numpy.inf
        right = values[i + 1] if i < last else -numpy.inf
        if not (value > left and value >= right):
            continue
        reliable = 0 < i < last and numpy.isfinite(left) and numpy.isfinite(right)
        refined_theta, refined_c = thetas[i], value
        if reliable:
            refined_theta, refined_c = _parabola_vertex(thetas[i - 1 : i + 2], values[i - 1 : i + 2])
        else:
            logger.warning(f"c_est maximum at the edge of the scan (theta={thetas[i]}), unreliable")
        match = snap_to_kac(refined_c, m_max)
        maxima.append(
            Maximum(float(thetas[i]), float(value), float(refined_theta), float(refined_c), match.charge, match.m, reliable)
        )
    return maxima


def scan_line(family, values, n_sites, method="auto"):
    """
    c_est along a parameter path, with the detected maxima.

    Failing points keep their error message and the scan continues.

    Returns:
        LineScan(points, maxima).
    """
    values = list(values)
    if len(values) < MIN_SCAN_POINTS:
        raise ValueError(f"a scan needs at least {MIN_SCAN_POINTS} points, got {len(values)}")
    points = []
    for theta in values:
        try:
            estimate = central_charge_at(family, theta, n_sites, method)
            points.append(ScanPoint(theta, estimate.c_est, estimate.epsilon, None))
        except (ValueError, RuntimeError, ArithmeticError) as err:
            logger.warning(f"scan point {family.parameter}={theta} failed: {err}")
            points.append(ScanPoint(theta, math.nan, math.nan, str(err)))
    c_values = numpy.array([point.c_est for point in points])
    return LineScan(points, find_maxima(numpy.array(values, dtype=float), c_values))


def locate_critical_point(family, bounds, n_sites, budget=30, method="auto", seed=0):
    """
    Maximize c_est along a line with a (1+1) evolution strategy.

    Args:
        bounds (tuple): (lower, upper) of the scanned parameter.

        budget (int): Number of c_est evaluations.

    Returns:
        CriticalSearch(theta, c_est, history) with history the list of (theta, c_est) evaluations.
    """
    lower, upper = bounds
    if not lower < upper:
        raise ValueError(f"bounds must satisfy lower < upper, got {bounds}")
    parametrization = nevergrad.p.Scalar(lower=lower, upper=upper)
    parametrization.random_state.seed(seed)
    optimizer = nevergrad.optimizers.OnePlusOne(parametrization=parametrization, budget=budget)
    history = []
    for _ in range(budget):
        candidate = optimizer.ask()
        c_est = central_charge_at(family, candidate.value, n_sites, method).c_est
        history.append((float(candidate.value), c_est))
        optimizer.tell(candidate, -c_est)
    recommendation = optimizer.provide_recommendation()
    theta = float(recommendation.value)
    return CriticalSearch(theta, central_charge_at(family, theta, n_sites, method).c_est, history)


def critical_surface(family, outer_parameter, outer_values, inner_values, n_sites, method="auto"):
    """For each value of a second parameter, the scanned value that maximizes c_est."""
    rows = []
    for outer in outer_values:
        line = family.with_fixed(**{outer_parameter: outer})
        scan = scan_line(line, inner_values, n_sites, method)
        c_values = numpy.array([point.c_est for point in scan.points])
        if numpy.all(numpy.isnan(c_values)):
            rows.append(SurfaceRow(outer, math.nan, math.nan, scan.points[0].error))
            continue
        best = int(numpy.nanargmax(c_values))
        rows.append(SurfaceRow(outer, scan.points[best].theta, float(c_values[best]), None))
    return rows
