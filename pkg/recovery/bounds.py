"""
Necessary-condition thresholds on the number of measurements
Dense-ensemble bounds f1/f2, sparsified-ensemble bounds g1/g2 with their
closed-form simplifications, and Fano lower bounds on the error probability.
Thresholds are real-valued and in nats; no rounding is applied.
"""

from dataclasses import dataclass, asdict
from typing import Optional, Tuple
import logging
import math

from django.db import models

from core.exceptions import DomainError, NumericError
from .mixtures import (
    HALF_LOG_2PI_E,
    EntropyBracket,
    binary_entropy,
    build_psi1,
    build_psi2,
    entropy_bracket,
    entropy_numeric,
)
from .params import ProblemParams, Regime, classify_regime, log_choose

logger = logging.getLogger(__name__)

__all__ = [
    'BoundReport', 'CorollaryBounds', 'CorollaryCase', 'Regime', 'classify_regime',
    'gauss_channel_lower', 'f1', 'f2', 'dense_threshold', 'g1', 'g2', 'g1_general',
    'g2_general', 'corollary_bounds', 'fano_error_lower_a', 'fano_error_lower_b',
    'fano_error_lower_sparse_a', 'fano_error_lower_sparse_b', 'evaluate_bounds',
]


class CorollaryCase(models.TextChoices):
    GENERAL = 'a', 'General'
    CONSTANT_TAU = 'b', 'gamma k = tau'
    SPARSE = 'c', 'gamma k <= 1'


@dataclass(frozen=True)
class CorollaryBounds:
    g1_lower: float
    g2_lower: Optional[float]
    case: str
    g1_general: float
    g2_general: Optional[float]


@dataclass(frozen=True)
class BoundReport:
    """All thresholds for one parameter point"""

    params: ProblemParams
    f1: float
    f2: float
    k_minus_1: float
    dense_threshold: float
    regime: str
    g1: Optional[float] = None
    g2: Optional[float] = None
    sparse_threshold: Optional[float] = None
    entropy_psi1: Optional[float] = None
    entropy_psi2: Optional[float] = None
    g1_lower: Optional[float] = None
    g2_lower: Optional[float] = None
    corollary_case: Optional[str] = None
    g1_general: Optional[float] = None
    g2_general: Optional[float] = None
    g1_bracket: Optional[Tuple[float, float]] = None
    g2_bracket: Optional[Tuple[float, float]] = None

    def as_record(self) -> dict:
        """Flat dict keyed by the CSV column names"""
        record = self.params.as_dict()
        data = asdict(self)
        data.pop('params')
        g1_bracket = data.pop('g1_bracket') or (None, None)
        g2_bracket = data.pop('g2_bracket') or (None, None)
        record.update(data)
        record['H_psi1'] = record.pop('entropy_psi1')
        record['H_psi2'] = record.pop('entropy_psi2')
        record['regime'] = str(self.regime)
        if self.corollary_case is not None:
            record['corollary_case'] = str(self.corollary_case)
        record['g1_bracket_low'], record['g1_bracket_high'] = g1_bracket
        record['g2_bracket_low'], record['g2_bracket_high'] = g2_bracket
        return record


def _require_signal(beta_min: float) -> float:
    beta_min = float(beta_min)
    if not beta_min > 0 or not math.isfinite(beta_min):
        raise DomainError(f"thresholds need a positive finite beta_min, got {beta_min}")
    return beta_min


def _support_numerator(p: int, k: int) -> float:
    return log_choose(p, k) - 1


def _location_numerator(p: int, k: int) -> float:
    remaining = p - k + 1
    if remaining < 2:
        raise DomainError(
            f"p - k + 1 = {remaining}: no location uncertainty left for the second bound"
        )
    return math.log(remaining) - 1


def gauss_channel_lower(p: int, k: int, signal_power: float) -> float:
    """log C(p, k) over the capacity of a Gaussian channel with the given SNR"""
    if not signal_power > 0:
        raise DomainError(f"signal_power must be positive, got {signal_power}")
    return log_choose(p, k) / (0.5 * math.log1p(signal_power))


def f1(p: int, k: int, beta_min: float) -> float:
    beta_min = _require_signal(beta_min)
    if k >= p:
        raise DomainError(f"f1 needs k < p (1 - k/p vanishes), got k={k}, p={p}")
    return _support_numerator(p, k) / (0.5 * math.log1p(k * beta_min ** 2 * (1 - k / p)))


def f2(p: int, k: int, beta_min: float) -> float:
    beta_min = _require_signal(beta_min)
    numerator = _location_numerator(p, k)
    return numerator / (0.5 * math.log1p(beta_min ** 2 * (1 - 1 / (p - k + 1))))


def dense_threshold(params: ProblemParams) -> BoundReport:
    """max(f1, f2, k - 1) for the dense ensemble"""
    value_f1 = f1(params.p, params.k, params.beta_min)
    value_f2 = f2(params.p, params.k, params.beta_min)
    k_minus_1 = float(params.k - 1)
    return BoundReport(
        params=params,
        f1=value_f1,
        f2=value_f2,
        k_minus_1=k_minus_1,
        dense_threshold=max(value_f1, value_f2, k_minus_1),
        regime=classify_regime(params.k, params.gamma),
    )


def _entropy_ratio(numerator: float, entropy: float, label: str) -> float:
    denominator = entropy - HALF_LOG_2PI_E
    if denominator <= 0:
        raise NumericError(
            f"{label} denominator H - 1/2 ln(2 pi e) = {denominator:.3g} is not positive",
            achieved_error=abs(denominator),
        )
    return numerator / denominator


def g1(params: ProblemParams, entropy: Optional[float] = None, tol: Optional[float] = None) -> float:
    """
    (log C(p, k) - 1) / (H(psi1) - 1/2 ln(2 pi e))

    Args:
        params: Problem point
        entropy: Precomputed H(psi1); computed by quadrature when omitted
        tol: Quadrature tolerance
    """
    _require_signal(params.beta_min)
    if entropy is None:
        entropy = entropy_numeric(build_psi1(params.k, params.gamma, params.beta_min), tol)
    return _entropy_ratio(_support_numerator(params.p, params.k), entropy, 'g1')


def g2(params: ProblemParams, entropy: Optional[float] = None, tol: Optional[float] = None) -> float:
    """(log(p - k + 1) - 1) / (H(psi2) - 1/2 ln(2 pi e))"""
    _require_signal(params.beta_min)
    numerator = _location_numerator(params.p, params.k)
    if entropy is None:
        entropy = entropy_numeric(build_psi2(params.gamma, params.beta_min), tol)
    return _entropy_ratio(numerator, entropy, 'g2')


def g1_general(params: ProblemParams) -> float:
    """g1 lower bound from the mixture variance alone; f1 without the 1 - k/p factor"""
    beta_min = _require_signal(params.beta_min)
    return _support_numerator(params.p, params.k) / (0.5 * math.log1p(params.k * beta_min ** 2))


def g2_general(params: ProblemParams) -> float:
    beta_min = _require_signal(params.beta_min)
    return _location_numerator(params.p, params.k) / (0.5 * math.log1p(beta_min ** 2))


def corollary_bounds(params: ProblemParams) -> CorollaryBounds:
    """
    Closed-form lower bounds on g1 and g2

    gamma k <= 1 uses the sparse case, anything larger the constant-tau case
    with tau = gamma k. The general bounds are always included. g2 bounds are
    None when k = p.
    """
    beta_min = _require_signal(params.beta_min)
    p, k, gamma = params.p, params.k, params.gamma
    beta_sq = beta_min ** 2
    tau = gamma * k
    numerator1 = _support_numerator(p, k)
    numerator2 = math.log(p - k + 1) - 1 if p - k + 1 >= 2 else None

    if tau <= 1:
        case = CorollaryCase.SPARSE
        log_term = math.log1p(beta_sq / gamma)
        g1_lower = numerator1 / (0.5 * tau * log_term + k * binary_entropy(gamma))
        denominator2 = 0.5 * gamma * log_term + binary_entropy(gamma)
    else:
        case = CorollaryCase.CONSTANT_TAU
        log_term = math.log1p(k * beta_sq / tau)
        constant = 0.5 * math.log(2 * math.pi * math.e * (tau + 1 / 12))
        g1_lower = numerator1 / (0.5 * tau * log_term + constant)
        denominator2 = 0.5 * (tau / k) * log_term + binary_entropy(tau / k)

    return CorollaryBounds(
        g1_lower=g1_lower,
        g2_lower=None if numerator2 is None else numerator2 / denominator2,
        case=case,
        g1_general=g1_general(params),
        g2_general=None if numerator2 is None else g2_general(params),
    )


def _clamp_probability(value: float) -> float:
    return min(1.0, max(0.0, value))


def _fano(n: float, information_per_measurement: float, log_hypotheses: float) -> float:
    if log_hypotheses <= 0:
        raise DomainError("Fano bound needs at least two hypotheses")
    return _clamp_probability(1 - (n * information_per_measurement + 1) / log_hypotheses)


def fano_error_lower_a(params: ProblemParams, n: Optional[float] = None) -> float:
    """Error floor of any decoder for restricted ensemble A on dense measurements"""
    n = params.n if n is None else n
    p, k = params.p, params.k
    information = 0.5 * math.log1p(k * params.beta_min_sq * (1 - k / p))
    return _fano(n, information, log_choose(p, k))


def fano_error_lower_b(params: ProblemParams, n: Optional[float] = None) -> float:
    """Error floor for restricted ensemble B; zero with a single candidate location"""
    n = params.n if n is None else n
    remaining = params.reduced_candidates
    if remaining == 1:
        return 0.0
    information = 0.5 * math.log1p(params.beta_min_sq * (1 - 1 / remaining))
    return _fano(n, information, math.log(remaining))


def fano_error_lower_sparse_a(params: ProblemParams, entropy: Optional[float] = None,
                              n: Optional[float] = None, tol: Optional[float] = None) -> float:
    """Error floor for restricted ensemble A on gamma-sparsified measurements"""
    n = params.n if n is None else n
    if entropy is None:
        entropy = entropy_numeric(build_psi1(params.k, params.gamma, params.beta_min), tol)
    return _fano(n, max(0.0, entropy - HALF_LOG_2PI_E), log_choose(params.p, params.k))


def fano_error_lower_sparse_b(params: ProblemParams, entropy: Optional[float] = None,
                              n: Optional[float] = None, tol: Optional[float] = None) -> float:
    n = params.n if n is None else n
    remaining = params.reduced_candidates
    if remaining == 1:
        return 0.0
    if entropy is None:
        entropy = entropy_numeric(build_psi2(params.gamma, params.beta_min), tol)
    return _fano(n, max(0.0, entropy - HALF_LOG_2PI_E), math.log(remaining))


def _bracket_thresholds(numerator: float, bracket: EntropyBracket) -> Tuple[float, float]:
    ends = []
    for entropy in (bracket.upper, bracket.lower_conditional):
        denominator = entropy - HALF_LOG_2PI_E
        ends.append(numerator / denominator if denominator > 0 else math.copysign(math.inf, numerator))
    return min(ends), max(ends)


def evaluate_bounds(params: ProblemParams, tol: Optional[float] = None) -> BoundReport:
    """
    Dense, sparse and corollary bounds for one parameter point

    When psi1 is too large to integrate, g1 is left out and the sparse
    threshold uses the lower end of its bracket.
    """
    dense = dense_threshold(params)
    bracket1 = entropy_bracket(build_psi1(params.k, params.gamma, params.beta_min), tol)
    bracket2 = entropy_bracket(build_psi2(params.gamma, params.beta_min), tol)

    numerator1 = _support_numerator(params.p, params.k)
    numerator2 = _location_numerator(params.p, params.k)
    g1_bracket = _bracket_thresholds(numerator1, bracket1)
    g2_bracket = _bracket_thresholds(numerator2, bracket2)

    value_g1 = None
    if bracket1.numeric is not None:
        value_g1 = _entropy_ratio(numerator1, bracket1.numeric, 'g1')
    value_g2 = _entropy_ratio(numerator2, bracket2.numeric, 'g2')
    sparse = max(value_g1 if value_g1 is not None else g1_bracket[0], value_g2, dense.k_minus_1)

    corollary = corollary_bounds(params)
    logger.debug(f"Bounds at {params}: dense={dense.dense_threshold:.6g}, sparse={sparse:.6g}")

    return BoundReport(
        params=params,
        f1=dense.f1,
        f2=dense.f2,
        k_minus_1=dense.k_minus_1,
        dense_threshold=dense.dense_threshold,
        regime=dense.regime,
        g1=value_g1,
        g2=value_g2,
        sparse_threshold=sparse,
        entropy_psi1=bracket1.numeric,
        entropy_psi2=bracket2.numeric,
        g1_lower=corollary.g1_lower,
        g2_lower=corollary.g2_lower,
        corollary_case=corollary.case,
        g1_general=corollary.g1_general,
        g2_general=corollary.g2_general,
        g1_bracket=g1_bracket,
        g2_bracket=g2_bracket,
    )
