"""
Lemma verification suite
Runs the covariance and density oracles and the analytic entropy checks over
fixed desk-scale grids and reports one row per check.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence
import logging
import math

import numpy as np
from django.conf import settings
from django.db import models

from core.exceptions import UsageError
from .ensembles import Ensemble, derive_seed
from .mixtures import (
    binary_entropy,
    binomial_entropy,
    binomial_entropy_upper_gaussian,
    binomial_entropy_upper_iid,
    build_psi1,
    entropy_bracket,
    expected_half_log_snr,
    lemma6_bounds,
)
from .oracles import default_density_grid, oracle_lemma1, oracle_lemma2, oracle_lemma3, oracle_lemma4
from .params import ProblemParams

logger = logging.getLogger(__name__)

ENTROPY_SLACK = 1e-6
ANALYTIC_SLACK = 1e-12
DENSITY_ABS_TOLERANCE = 0.005
COVARIANCE_REL_TOLERANCE = 0.05
COVARIANCE_OFFDIAG_TOLERANCE = 0.05
PSI2_AT_ZERO = 0.5 / math.sqrt(6 * math.pi) + 0.5 / math.sqrt(2 * math.pi)

COVARIANCE_ENSEMBLES = (Ensemble.STD_GAUSSIAN, Ensemble.RADEMACHER, Ensemble.UNIFORM)
ENTROPY_GRID_K = (1, 2, 4, 8)
ENTROPY_GRID_GAMMA = (0.05, 0.1, 0.25, 0.5, 1.0)
BETA_GRID = (0.25, 1.0, 4.0)
LEMMA6_GAMMA = (0.01, 0.02, 0.05, 0.1, 0.2, 0.25, 0.5, 0.75, 1.0)
APPENDIX_GAMMA = (0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0)
VANISHING_K = (10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5)


class Scope(models.TextChoices):
    LEMMA1 = 'lemma1', 'Averaged covariance, ensemble A'
    LEMMA2 = 'lemma2', 'Averaged covariance, ensemble B'
    LEMMA3 = 'lemma3', 'Binomial mixture density'
    LEMMA4 = 'lemma4', 'Bernoulli mixture density'
    LEMMA5 = 'lemma5', 'Entropy sandwich'
    LEMMA6 = 'lemma6', 'Expected half log SNR bounds'
    APPENDIX_E = 'appendixE', 'Binomial entropy bounds'


@dataclass(frozen=True)
class VerificationRow:
    scope: str
    check: str
    parameters: str
    observed: float
    lower: Optional[float]
    upper: Optional[float]
    passed: bool

    def as_record(self) -> dict:
        return {
            'scope': str(self.scope),
            'check': self.check,
            'parameters': self.parameters,
            'observed': self.observed,
            'lower': self.lower,
            'upper': self.upper,
            'passed': self.passed,
        }


def _row(scope, check, parameters, observed, lower=None, upper=None) -> VerificationRow:
    observed = float(observed)
    passed = math.isfinite(observed)
    if lower is not None:
        passed = passed and observed >= lower
    if upper is not None:
        passed = passed and observed <= upper
    return VerificationRow(scope, check, parameters, observed, lower, upper, passed)


def _describe(**values) -> str:
    return ' '.join(f"{key}={value:g}" if isinstance(value, float) else f"{key}={value}"
                    for key, value in values.items())


def _covariance_rows(scope: str, oracle, seed: int, samples: int) -> List[VerificationRow]:
    params = ProblemParams(n=4, p=6, k=2, beta_min=1.0)
    sigmas = settings.ORACLE_SIGMAS
    rows = []
    diagonal_means = []
    for index, ensemble in enumerate(COVARIANCE_ENSEMBLES):
        report = oracle(params, ensemble, samples, derive_seed(seed, index))
        label = _describe(n=params.n, p=params.p, k=params.k, beta_min=params.beta_min,
                          ensemble=str(ensemble), samples=samples)
        diagonal = np.diag(report.empirical)
        worst = float(diagonal[np.argmax(np.abs(diagonal - report.predicted_diag))])
        margin = sigmas * report.diag_standard_error
        rows.append(_row(scope, 'diagonal', label, worst,
                         report.predicted_diag - margin, report.predicted_diag + margin))
        rows.append(_row(scope, 'diagonal_relative_deviation', label, report.max_diag_reldev,
                         0.0, COVARIANCE_REL_TOLERANCE))
        rows.append(_row(scope, 'max_offdiagonal', label, report.max_offdiag_abs,
                         0.0, max(COVARIANCE_OFFDIAG_TOLERANCE, sigmas * report.offdiag_standard_error)))
        diagonal_means.append((float(diagonal.mean()), report.diag_standard_error))

    means = [m for m, _ in diagonal_means]
    spread = max(means) - min(means)
    combined = sigmas * math.sqrt(2) * max(se for _, se in diagonal_means)
    rows.append(_row(scope, 'ensemble_agreement',
                     _describe(ensembles=','.join(str(e) for e in COVARIANCE_ENSEMBLES)),
                     spread, 0.0, combined))

    null = oracle(params.with_(beta_min=0.0), Ensemble.STD_GAUSSIAN, samples, derive_seed(seed, 99))
    rows.append(_row(scope, 'zero_signal_identity',
                     _describe(n=params.n, p=params.p, k=params.k, beta_min=0.0, samples=samples),
                     null.max_diag_reldev, 0.0, 0.02))
    return rows


def _density_rows(scope: str, seed: int, samples: int) -> List[VerificationRow]:
    grid = default_density_grid()
    sigmas = settings.ORACLE_SIGMAS
    rows = []
    gammas = (0.5, 1.0) if scope == Scope.LEMMA3 else (0.5,)
    for index, gamma in enumerate(gammas):
        params = ProblemParams(n=1, p=4, k=2, beta_min=1.0, gamma=gamma)
        oracle = oracle_lemma3 if scope == Scope.LEMMA3 else oracle_lemma4
        report = oracle(params, grid, samples, derive_seed(seed, index))
        label = _describe(p=params.p, k=params.k, beta_min=params.beta_min, gamma=gamma, samples=samples)
        rows.append(_row(scope, 'max_abs_deviation', label, report.max_abs_deviation,
                         0.0, DENSITY_ABS_TOLERANCE))
        rows.append(_row(scope, 'max_standardized_deviation', label,
                         float(np.max(report.deviations / np.maximum(report.standard_errors, 1e-300))),
                         0.0, sigmas))
        if scope == Scope.LEMMA4:
            centre = int(np.argmin(np.abs(grid)))
            rows.append(_row(scope, 'density_at_zero', label, report.empirical[centre],
                             PSI2_AT_ZERO - DENSITY_ABS_TOLERANCE, PSI2_AT_ZERO + DENSITY_ABS_TOLERANCE))
    return rows


def _entropy_rows() -> List[VerificationRow]:
    rows = []
    for k in ENTROPY_GRID_K:
        for gamma in ENTROPY_GRID_GAMMA:
            for beta_min in BETA_GRID:
                bracket = entropy_bracket(build_psi1(k, gamma, beta_min))
                rows.append(_row(Scope.LEMMA5, 'entropy_sandwich',
                                 _describe(k=k, gamma=gamma, beta_min=beta_min),
                                 bracket.numeric,
                                 bracket.lower_conditional - ENTROPY_SLACK,
                                 bracket.upper + ENTROPY_SLACK))
    return rows


def _lemma6_rows() -> List[VerificationRow]:
    rows = []
    for k in range(1, 31):
        for gamma in LEMMA6_GAMMA:
            for beta_min in BETA_GRID:
                bounds = lemma6_bounds(k, gamma, beta_min)
                rows.append(_row(Scope.LEMMA6, f'expectation_case_{str(bounds.case)}',
                                 _describe(k=k, gamma=gamma, beta_min=beta_min),
                                 expected_half_log_snr(k, gamma, beta_min),
                                 bounds.lower - ANALYTIC_SLACK, bounds.upper + ANALYTIC_SLACK))
    return rows


def _appendix_rows() -> List[VerificationRow]:
    rows = []
    for k in range(1, 101):
        for gamma in APPENDIX_GAMMA:
            exact = binomial_entropy(k, gamma)
            label = _describe(k=k, gamma=gamma)
            rows.append(_row(Scope.APPENDIX_E, 'upper_iid', label, exact,
                             upper=binomial_entropy_upper_iid(k, gamma) + ANALYTIC_SLACK))
            rows.append(_row(Scope.APPENDIX_E, 'upper_gaussian', label, exact,
                             upper=binomial_entropy_upper_gaussian(k, gamma) + ANALYTIC_SLACK))

    trend = [k * binary_entropy(1 / (k * math.log(k) * math.log(math.log(k)))) for k in VANISHING_K]
    for (k_prev, previous), (k_next, current) in zip(zip(VANISHING_K, trend), zip(VANISHING_K[1:], trend[1:])):
        rows.append(_row(Scope.APPENDIX_E, 'vanishing_label_entropy',
                         _describe(k_from=k_prev, k_to=k_next), current, 0.0, previous))
    return rows


def parse_scopes(scopes: Iterable[str]) -> List[str]:
    """Validate scope names, keeping their canonical order"""
    requested = [str(scope).strip() for scope in scopes if str(scope).strip()]
    if not requested:
        raise UsageError(f"At least one scope is required; choose from {', '.join(Scope.values)}")
    unknown = sorted(set(requested) - set(Scope.values))
    if unknown:
        raise UsageError(f"Unknown scope(s) {', '.join(unknown)}; choose from {', '.join(Scope.values)}")
    return [scope for scope in Scope.values if scope in requested]


def run_verification(scopes: Sequence[str], seed: int,
                     covariance_samples: Optional[int] = None,
                     density_samples: Optional[int] = None) -> List[VerificationRow]:
    """
    Run the requested checks in canonical scope order

    Each scope draws from its own child seed of `seed`.
    """
    covariance_samples = covariance_samples or settings.VERIFY_COVARIANCE_SAMPLES
    density_samples = density_samples or settings.VERIFY_DENSITY_SAMPLES
    rows = []
    for scope in parse_scopes(scopes):
        scope_seed = derive_seed(seed, Scope.values.index(scope))
        if scope == Scope.LEMMA1:
            rows.extend(_covariance_rows(scope, oracle_lemma1, scope_seed, covariance_samples))
        elif scope == Scope.LEMMA2:
            rows.extend(_covariance_rows(scope, oracle_lemma2, scope_seed, covariance_samples))
        elif scope in (Scope.LEMMA3, Scope.LEMMA4):
            rows.extend(_density_rows(scope, scope_seed, density_samples))
        elif scope == Scope.LEMMA5:
            rows.extend(_entropy_rows())
        elif scope == Scope.LEMMA6:
            rows.extend(_lemma6_rows())
        elif scope == Scope.APPENDIX_E:
            rows.extend(_appendix_rows())
        failed = sum(1 for row in rows if row.scope == scope and not row.passed)
        if failed:
            logger.warning(f"Scope {scope}: {failed} check(s) failed")
        else:
            logger.info(f"Scope {scope}: all checks passed")
    return rows
