from __future__ import annotations
from typing import Iterable, List, NamedTuple, Optional
import logging
import math
import warnings

import numpy as np
from scipy import integrate

from ..model.asymptotics_model import ConditionReport, Schedule, TVariant
from ..model.density_model import GmmModel, Hyperplane
from ..model.exceptions import InvalidInputError, NumericalAccuracyError, VariantInconsistencyError
from ..model.graph_model import SimilarityGraph
from ..model.signal_model import IndicatorSignal, as_indicator
from . import density
from .graph import laplacian_apply

logger = logging.getLogger(__name__)

DIRECT_SUM_MAX_ORDER = 30
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def log_c_constant(d: int) -> float:
    """log C for C = 2/(2 pi)^(d/2)."""
    return math.log(2.0) - 0.5 * d * math.log(2.0 * math.pi)


# --------------------------------------------------------------
# t(m) and the bias limit
# --------------------------------------------------------------

def _t_direct(m: int, start: int) -> float:
    terms = [
        math.comb(m - 1, r) * (-1) ** r * (math.sqrt(r + 1) - math.sqrt(r))
        for r in range(start, m)
    ]
    return math.fsum(terms)


def _t_corrected_integral(m: int) -> float:
    """
    Corrected t(m) as (1/(2 sqrt(pi))) * int_0^inf (1 - e^-u)^m u^(-3/2) du.

    Follows from sqrt(a) = (1/(2 sqrt(pi))) int (1 - e^(-a u)) u^(-3/2) du and the
    binomial theorem; the integrand is positive, so no cancellation occurs.
    """
    def integrand(u):
        if u <= 0.0:
            return 0.0
        return math.exp(m * math.log(-math.expm1(-u)) - 1.5 * math.log(u))

    split = math.log(m) + 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        head, head_err = integrate.quad(integrand, 0.0, split, points=[math.log(m)] if m > 1 else None, limit=200, epsabs=0.0, epsrel=1e-11)
        tail, tail_err = integrate.quad(integrand, split, math.inf, limit=200, epsabs=0.0, epsrel=1e-11)
    value = (head + tail) / (2.0 * math.sqrt(math.pi))
    error = (head_err + tail_err) / (2.0 * math.sqrt(math.pi))
    if not math.isfinite(value) or error > 1e-8 * abs(value):
        raise NumericalAccuracyError(f"t({m}) quadrature did not converge (error estimate {error:.3g})")
    return value


def t_coefficient(m: int, variant: TVariant = TVariant.CORRECTED) -> float:
    """
    Combinatorial constant sum_r C(m-1, r) (-1)^r (sqrt(r+1) - sqrt(r)).

    The printed variant sums from r = 1, the corrected one from r = 0; the two
    differ by exactly the r = 0 term, which is 1.
    """
    if m < 1:
        raise InvalidInputError(f"Order m must be >= 1, got {m}")
    variant = TVariant(variant)
    if m <= DIRECT_SUM_MAX_ORDER:
        return _t_direct(m, 0 if variant is TVariant.CORRECTED else 1)
    corrected = _t_corrected_integral(m)
    return corrected if variant is TVariant.CORRECTED else corrected - 1.0


def bias_limit(model: GmmModel, plane: Hyperplane, m: int,
               variant: TVariant = TVariant.CORRECTED) -> float:
    """Limit of E[V]: t(m)/sqrt(2 pi) times the boundary integral of p^(m+1)."""
    t = t_coefficient(m, variant)
    if t == 0.0:
        return 0.0
    integral = density.boundary_power_integral(model, plane, m + 1)
    return t / math.sqrt(2.0 * math.pi) * integral


def cut_limit(model: GmmModel, plane: Hyperplane) -> float:
    """Cut limit: boundary integral of p^2."""
    return density.boundary_power_integral(model, plane, 2)


def finite_m_prediction(model: GmmModel, plane: Hyperplane, m: int, sigma: float,
                        variant: TVariant = TVariant.CORRECTED) -> float:
    """
    Theoretical counterpart of the empirical omega_m:
    (sigma * bias_limit / region_mass)^(1/m), evaluated in the log domain.
    """
    if sigma <= 0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    t = t_coefficient(m, variant)
    if t <= 0.0:
        raise VariantInconsistencyError(
            f"t({m}) = {t:.6g} under the {TVariant(variant).value} variant gives a nonpositive bias limit"
        )
    mass = density.region_mass(model, plane)
    log_integral = density.log_boundary_power_integral(model, plane, m + 1)
    if mass <= 0.0 or not math.isfinite(log_integral):
        return 0.0
    log_value = math.log(sigma) + math.log(t) - LOG_SQRT_2PI + log_integral - math.log(mass)
    return math.exp(log_value / m)


def limit_bandwidth(model: GmmModel, plane: Hyperplane) -> float:
    """Limit of omega_m(1_S): sup of p over the boundary."""
    return density.sup_on_boundary(model, plane)


# --------------------------------------------------------------
# Empirical statistics on a graph
# --------------------------------------------------------------

class YStatistic(NamedTuple):
    v: float
    y_m: float
    omega_m: float


def y_statistic(graph: SimilarityGraph, s: IndicatorSignal, m: int) -> YStatistic:
    """
    V = (1/(n sigma)) s^T L^m s, Y_m = (1/sigma) s^T L^m s / s^T s and
    omega_m = (sigma Y_m)^(1/m) for one graph and indicator.
    """
    if m < 1:
        raise InvalidInputError(f"Order m must be >= 1, got {m}")
    s = as_indicator(s, graph.n)
    count = float(s.sum())
    if count == 0.0:
        raise InvalidInputError("Indicator selects no points")
    half = s
    for _ in range(m // 2):
        half = laplacian_apply(graph, half)
    quadratic = float(half @ half) if m % 2 == 0 else float(half @ laplacian_apply(graph, half))
    quadratic = max(quadratic, 0.0)
    v = quadratic / (graph.n * graph.sigma)
    y_m = quadratic / (graph.sigma * count)
    return YStatistic(v=v, y_m=y_m, omega_m=(graph.sigma * y_m) ** (1.0 / m))


# --------------------------------------------------------------
# Concentration bound, conditions, schedules
# --------------------------------------------------------------

def bernstein_log_exponent(n: int, m: int, sigma: float, d: int,
                           expected_v: float, epsilon: float) -> float:
    """
    log of the magnitude of the exponent in the concentration bound,
    floor(n/(m+1)) sigma^(md+1) eps^2 / (2 C^m E[V] + (2/3)|C^m - sigma^(md+1) E[V]| eps),
    computed with C^m factored out.
    """
    if min(n, m, sigma, d, expected_v, epsilon) <= 0:
        raise InvalidInputError("All bound parameters must be positive")
    blocks = n // (m + 1)
    if blocks == 0:
        return -math.inf
    # a = log(sigma^(md+1) / C^m)
    a = (m * d + 1) * math.log(sigma) - m * log_c_constant(d)
    b = a + math.log(expected_v)
    if b > 0:
        log_gap = b + math.log(-math.expm1(-b))
    elif b < 0:
        log_gap = math.log(-math.expm1(b))
    else:
        log_gap = -math.inf
    log_denominator = np.logaddexp(
        math.log(2.0 * expected_v),
        math.log(2.0 / 3.0) + math.log(epsilon) + log_gap,
    )
    return math.log(blocks) + 2.0 * math.log(epsilon) + a - float(log_denominator)


def bernstein_tail_bound(n: int, m: int, sigma: float, d: int,
                         expected_v: float, epsilon: float) -> float:
    """Upper bound on P(|V - E[V]| > epsilon); 2 is the vacuous value."""
    log_exponent = bernstein_log_exponent(n, m, sigma, d, expected_v, epsilon)
    if log_exponent > 709.0:
        return 0.0
    return min(2.0, 2.0 * math.exp(-math.exp(log_exponent)))


def check_conditions(n: int, sigma: float, m: int, d: int) -> ConditionReport:
    if min(n, sigma, m, d) <= 0:
        raise InvalidInputError("Condition inputs must be positive")
    log_c = log_c_constant(d)
    log_c5 = math.log(n) + (m * d + 1) * math.log(sigma) - math.log(m) - m * log_c
    log_strong = log_c5 - math.log(math.log(n)) if n > 1 else math.nan
    return ConditionReport(
        n=n, sigma=sigma, m=m, dimension=d, log_c=log_c,
        quantity_c3a=m / n,
        quantity_c3b=m * sigma ** 2,
        quantity_c4=math.exp(-math.log(sigma) / m),
        log_quantity_c5=log_c5,
        log_strong_c5=log_strong,
    )


def schedule(n: int, x: float, y: float, d: int, log_base: Optional[float] = None) -> Schedule:
    """sigma = n^(-x/(md+1)), m = round((log n)^y) clamped to >= 1."""
    if n < 3:
        raise InvalidInputError(f"Schedule needs n >= 3, got {n}")
    log_n = math.log(n) if log_base is None else math.log(n, log_base)
    m = max(1, math.floor(log_n ** y + 0.5))
    sigma = n ** (-x / (m * d + 1))
    return Schedule(n=n, sigma=sigma, m=m, x=x, y=y, dimension=d, log_base=log_base)


def schedule_sweep(sizes: Iterable[int], x: float, y: float, d: int,
                   log_base: Optional[float] = None) -> List[dict]:
    """Schedule rows with their condition reports for a list of sample sizes."""
    rows = []
    for n in sizes:
        plan = schedule(n, x, y, d, log_base)
        report = check_conditions(plan.n, plan.sigma, plan.m, d)
        rows.append({**plan.model_dump(), **report.as_dict()})
    return rows
