"""
Zero-mean Gaussian scale mixtures of the averaged observation density
Binomial-labelled (psi1) and Bernoulli-labelled (psi2) mixtures, their
densities, numerical differential entropy and analytic entropy bounds.
All entropies are in nats.
"""

from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple
import logging
import math

import numpy as np
from django.conf import settings
from django.db import models
from scipy.integrate import quad
from scipy.special import entr, gammaln, logsumexp, xlog1py, xlogy
from scipy.stats import norm

from core.exceptions import CapacityError, DomainError, NumericError
from .params import Regime, classify_regime

logger = logging.getLogger(__name__)

HALF_LOG_2PI_E = 0.5 * math.log(2 * math.pi * math.e)
WEIGHT_SUM_TOLERANCE = 1e-12
# Mass of the widest component left outside the integration range, relative to tol
TAIL_MASS_FACTOR = 1e-3
MAX_BREAKPOINTS = 50


class LabelKind(models.TextChoices):
    BINOMIAL = 'binomial', 'Binomial(k, gamma)'
    BERNOULLI = 'bernoulli', 'Bernoulli(gamma)'
    DEGENERATE = 'degenerate', 'Degenerate'


@dataclass(frozen=True)
class GaussianMixtureSpec:
    """
    Zero-mean mixture sum_i w_i N(0, v_i)

    Components are ordered by decreasing label, so the widest comes first.
    Zero-weight components are dropped. Equality ignores label_kind: a
    one-trial binomial mixture equals the Bernoulli one.
    """

    weights: Tuple[float, ...]
    variances: Tuple[float, ...]
    label_kind: str = field(default=LabelKind.DEGENERATE, compare=False)
    labels: Tuple[int, ...] = ()
    k: Optional[int] = None
    gamma: Optional[float] = None
    beta_min: Optional[float] = None

    def __post_init__(self):
        if len(self.weights) != len(self.variances) or not self.weights:
            raise DomainError("a mixture needs matching, non-empty weights and variances")
        if self.labels and len(self.labels) != len(self.weights):
            raise DomainError("labels must match the components")
        if any(w < 0 or w > 1 for w in self.weights):
            raise DomainError("mixture weights must lie in [0, 1]")
        if abs(math.fsum(self.weights) - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise DomainError(f"mixture weights sum to {math.fsum(self.weights)!r}, not 1")
        if any(not v >= 1 for v in self.variances):
            raise DomainError("component variances must be at least the unit noise floor")

    @property
    def components(self):
        return list(zip(self.weights, self.variances))

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def variance(self) -> float:
        """Second moment of the mixture, sum of w_i v_i"""
        return math.fsum(w * v for w, v in self.components)

    @property
    def label_entropy(self) -> float:
        """Entropy of the component label; zero for an unlabelled mixture"""
        if self.label_kind == LabelKind.DEGENERATE:
            return 0.0
        return float(np.sum(entr(np.asarray(self.weights))))

    @property
    def is_labelled(self) -> bool:
        return self.label_kind != LabelKind.DEGENERATE

    def log_density(self, y):
        y = np.asarray(y, dtype=float)
        weights = np.asarray(self.weights)
        variances = np.asarray(self.variances)
        terms = (np.log(weights) - 0.5 * np.log(2 * np.pi * variances)
                 - y[..., None] ** 2 / (2 * variances))
        result = logsumexp(terms, axis=-1)
        return float(result) if result.ndim == 0 else result


@dataclass(frozen=True)
class EntropyBracket:
    """Numerical entropy with the label-conditioning and variance bounds around it"""

    numeric: Optional[float]
    upper_variance: float
    upper_lemma5: float
    lower_conditional: float

    @property
    def upper(self) -> float:
        return min(self.upper_variance, self.upper_lemma5)

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower_conditional - tol <= value <= self.upper + tol


@dataclass(frozen=True)
class Lemma6Bounds:
    lower: float
    upper: float
    case: str

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol


def _check_gamma(gamma: float, allow_zero: bool = False) -> float:
    gamma = float(gamma)
    low_ok = gamma >= 0 if allow_zero else gamma > 0
    if not (low_ok and gamma <= 1):
        raise DomainError(f"gamma must lie in {'[0' if allow_zero else '(0'}, 1], got {gamma}")
    return gamma


def _check_beta(beta_min: float) -> float:
    beta_min = float(beta_min)
    if not math.isfinite(beta_min) or beta_min < 0:
        raise DomainError(f"beta_min must be finite and non-negative, got {beta_min}")
    return beta_min


def binomial_log_pmf(k: int, gamma: float) -> np.ndarray:
    """log P(L = l) for L ~ Bin(k, gamma), l = 0..k, computed in log space"""
    if k < 0:
        raise DomainError(f"k must be non-negative, got {k}")
    gamma = _check_gamma(gamma, allow_zero=True)
    labels = np.arange(k + 1)
    log_coeff = gammaln(k + 1) - gammaln(labels + 1) - gammaln(k - labels + 1)
    return log_coeff + xlogy(labels, gamma) + xlog1py(k - labels, -gamma)


def binomial_pmf(k: int, gamma: float) -> np.ndarray:
    return np.exp(binomial_log_pmf(k, gamma))


def _labelled_mixture(k: int, gamma: float, beta_min: float, kind: str) -> GaussianMixtureSpec:
    gamma = _check_gamma(gamma)
    beta_min = _check_beta(beta_min)
    pmf = binomial_pmf(k, gamma)
    pmf = pmf / math.fsum(pmf)

    labels = np.arange(k, -1, -1)
    weights = pmf[labels]
    keep = weights > 0
    labels = labels[keep]
    weights = weights[keep]
    weights = weights / math.fsum(weights)
    variances = 1.0 + labels * (beta_min ** 2 / gamma)

    return GaussianMixtureSpec(
        weights=tuple(float(w) for w in weights),
        variances=tuple(float(v) for v in variances),
        label_kind=kind,
        labels=tuple(int(l) for l in labels),
        k=k,
        gamma=gamma,
        beta_min=beta_min,
    )


def build_psi1(k: int, gamma: float, beta_min: float) -> GaussianMixtureSpec:
    """
    Binomial-weighted mixture: component l ~ N(0, 1 + l beta_min^2 / gamma)
    with weight C(k, l) gamma^l (1 - gamma)^(k - l)
    """
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    return _labelled_mixture(int(k), gamma, beta_min, LabelKind.BINOMIAL)


def build_psi2(gamma: float, beta_min: float) -> GaussianMixtureSpec:
    """Bernoulli-weighted mixture gamma N(0, 1 + beta_min^2/gamma) + (1 - gamma) N(0, 1)"""
    return _labelled_mixture(1, gamma, beta_min, LabelKind.BERNOULLI)


def mixture_from_components(components: Iterable[Tuple[float, float]]) -> GaussianMixtureSpec:
    """Unlabelled mixture from (weight, variance) pairs"""
    pairs = [(float(w), float(v)) for w, v in components if w > 0]
    if not pairs:
        raise DomainError("a mixture needs at least one component with positive weight")
    return GaussianMixtureSpec(
        weights=tuple(w for w, _ in pairs),
        variances=tuple(v for _, v in pairs),
    )


def density(spec: GaussianMixtureSpec, y):
    """
    Mixture density at y (scalar or array)

    Strictly positive and even in y.
    """
    y_arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y_arr)):
        raise DomainError("density needs finite arguments")
    scales = np.sqrt(np.asarray(spec.variances))
    values = norm.pdf(y_arr[..., None], scale=scales) @ np.asarray(spec.weights)
    return float(values) if np.ndim(values) == 0 else values


def _integration_limit(spec: GaussianMixtureSpec, tol: float) -> float:
    widest = math.sqrt(max(spec.variances))
    return widest * float(norm.isf(tol * TAIL_MASS_FACTOR / 2))


def _breakpoints(spec: GaussianMixtureSpec, upper: float):
    scales = sorted({math.sqrt(v) for v in spec.variances})
    points = [s for s in scales if 0 < s < upper]
    if len(points) > MAX_BREAKPOINTS:
        picks = np.unique(np.round(np.geomspace(1, len(points), MAX_BREAKPOINTS)).astype(int) - 1)
        points = [points[i] for i in picks]
    return points or None


def entropy_numeric(spec: GaussianMixtureSpec, tol: Optional[float] = None,
                    limit: Optional[int] = None) -> float:
    """
    Differential entropy -int psi ln psi by adaptive quadrature

    Integrates over [0, Y_max] and doubles by symmetry. Y_max leaves a tail
    mass of the widest component far below tol.

    Args:
        spec: Mixture to integrate
        tol: Absolute error target (defaults to QUADRATURE_TOLERANCE)
        limit: Maximum subintervals (defaults to QUADRATURE_SUBDIVISION_LIMIT)

    Returns:
        Entropy in nats

    Raises:
        CapacityError: Mixture larger than MAX_MIXTURE_COMPONENTS
        NumericError: Quadrature did not reach tol within limit subintervals
    """
    tol = settings.QUADRATURE_TOLERANCE if tol is None else float(tol)
    limit = settings.QUADRATURE_SUBDIVISION_LIMIT if limit is None else int(limit)
    if tol <= 0:
        raise DomainError(f"quadrature tolerance must be positive, got {tol}")
    if spec.size > settings.MAX_MIXTURE_COMPONENTS:
        raise CapacityError(spec.size, settings.MAX_MIXTURE_COMPONENTS)

    def integrand(y):
        log_psi = spec.log_density(y)
        return -math.exp(log_psi) * log_psi

    upper = _integration_limit(spec, tol)
    points = _breakpoints(spec, upper)
    limit = max(limit, 2 * (len(points or ()) + 2))
    result = quad(integrand, 0.0, upper, epsabs=tol / 2, epsrel=0.0, limit=limit,
                  points=points, full_output=1)
    value, abserr = 2 * result[0], 2 * result[1]

    if abserr > tol or not math.isfinite(value):
        message = result[3] if len(result) > 3 else 'no convergence'
        logger.warning(f"Entropy quadrature missed tolerance {tol:g}: error {abserr:g} ({message})")
        raise NumericError(
            f"Entropy quadrature reached error {abserr:.3g} > {tol:.3g} within {limit} subintervals",
            achieved_error=abserr,
        )
    return value


def entropy_bracket(spec: GaussianMixtureSpec, tol: Optional[float] = None,
                    include_numeric: bool = True) -> EntropyBracket:
    """
    Label-conditioning bracket H(Z|L) <= H(Z) <= H(Z|L) + H(L), the
    maximum-entropy bound 1/2 ln(2 pi e Var) and the numerical value

    The numerical value is None when the mixture is too large to integrate.
    """
    if not spec.is_labelled:
        raise DomainError("entropy_bracket needs a Binomial or Bernoulli labelled mixture")

    weights = np.asarray(spec.weights)
    variances = np.asarray(spec.variances)
    lower_conditional = float(weights @ (0.5 * np.log(2 * np.pi * np.e * variances)))
    upper_lemma5 = lower_conditional + spec.label_entropy
    upper_variance = 0.5 * math.log(2 * math.pi * math.e * spec.variance)

    numeric = None
    if include_numeric:
        if spec.size <= settings.MAX_MIXTURE_COMPONENTS:
            numeric = entropy_numeric(spec, tol)
        else:
            logger.info(f"Mixture with {spec.size} components reported by its bracket only")

    return EntropyBracket(
        numeric=numeric,
        upper_variance=upper_variance,
        upper_lemma5=upper_lemma5,
        lower_conditional=lower_conditional,
    )


def expected_half_log_snr(k: int, gamma: float, beta_min: float) -> float:
    """E_L[1/2 ln(1 + L beta_min^2 / gamma)] for L ~ Bin(k, gamma), by pmf summation"""
    gamma = _check_gamma(gamma)
    beta_min = _check_beta(beta_min)
    pmf = binomial_pmf(k, gamma)
    labels = np.arange(k + 1)
    return float(pmf @ (0.5 * np.log1p(labels * beta_min ** 2 / gamma)))


def lemma6_bounds(k: int, gamma: float, beta_min: float) -> Lemma6Bounds:
    """Case-matched bounds on expected_half_log_snr"""
    gamma = _check_gamma(gamma)
    beta_min = _check_beta(beta_min)
    beta_sq = beta_min ** 2
    case = classify_regime(k, gamma)
    tau = gamma * k

    if case == Regime.DENSE_LIKE:
        lower = 0.25 * math.log1p(k * beta_sq / 3)
        upper = 0.5 * math.log1p(k * beta_sq)
    elif case == Regime.TRANSITIONAL:
        log_term = math.log1p(k * beta_sq / tau)
        lower = 0.5 * (1 - math.exp(-tau)) * log_term
        upper = 0.5 * tau * log_term
    else:
        log_term = math.log1p(beta_sq / gamma)
        lower = 0.25 * tau * log_term
        upper = 0.5 * tau * log_term

    return Lemma6Bounds(lower=lower, upper=upper, case=case)


def binary_entropy(gamma: float) -> float:
    """Entropy of Ber(gamma) in nats with 0 ln 0 = 0"""
    gamma = _check_gamma(gamma, allow_zero=True)
    return float(entr(gamma) + entr(1 - gamma))


def binomial_entropy(k: int, gamma: float) -> float:
    """Exact entropy of Bin(k, gamma) by pmf summation"""
    return float(np.sum(entr(binomial_pmf(k, gamma))))


def binomial_entropy_upper_iid(k: int, gamma: float) -> float:
    """k Hb(gamma): entropy of the k independent indicators L sums"""
    return k * binary_entropy(gamma)


def binomial_entropy_upper_gaussian(k: int, gamma: float) -> float:
    """1/2 ln(2 pi e (k gamma (1 - gamma) + 1/12)), the continuous-relaxation bound"""
    gamma = _check_gamma(gamma, allow_zero=True)
    return 0.5 * math.log(2 * math.pi * math.e * (k * gamma * (1 - gamma) + 1 / 12))
