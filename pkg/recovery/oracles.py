"""
Brute-force Monte Carlo oracles for the averaged covariance and averaged density

Covariance oracles estimate E[(Y - mu(X))(Y - mu(X))'] over matrix, support
and noise draws, with mu(X) = E[Y | X]. Density oracles average the
conditional observation density of one row over matrix draws.
"""

from dataclasses import dataclass
from typing import Optional, Sequence
import logging

import numpy as np
from django.conf import settings
from scipy.stats import norm

from core.exceptions import DomainError
from .ensembles import Ensemble, Purpose, draw_entries, substream
from .mixtures import build_psi1, build_psi2, density
from .params import ProblemParams, support_index_array

logger = logging.getLogger(__name__)

# Cap on batch * supports * grid points held at once by the density oracles
DENSITY_WORK_LIMIT = 4_000_000


@dataclass(frozen=True)
class CovarianceOracleReport:
    empirical: np.ndarray
    predicted_diag: float
    max_offdiag_abs: float
    max_diag_reldev: float
    diag_standard_error: float
    offdiag_standard_error: float
    samples: int

    def passed(self, sigmas: Optional[float] = None) -> bool:
        """Every entry within `sigmas` standard errors of predicted_diag * I"""
        sigmas = settings.ORACLE_SIGMAS if sigmas is None else sigmas
        n = self.empirical.shape[0]
        diag_ok = np.all(np.abs(np.diag(self.empirical) - self.predicted_diag)
                         <= sigmas * self.diag_standard_error)
        offdiag_ok = n < 2 or self.max_offdiag_abs <= sigmas * self.offdiag_standard_error
        return bool(diag_ok and offdiag_ok)


@dataclass(frozen=True)
class DensityOracleReport:
    grid: np.ndarray
    empirical: np.ndarray
    predicted: np.ndarray
    standard_errors: np.ndarray
    samples: int

    @property
    def deviations(self) -> np.ndarray:
        return np.abs(self.empirical - self.predicted)

    @property
    def max_abs_deviation(self) -> float:
        return float(self.deviations.max())

    def passed(self, sigmas: Optional[float] = None) -> bool:
        sigmas = settings.ORACLE_SIGMAS if sigmas is None else sigmas
        return bool(np.all(self.deviations <= sigmas * self.standard_errors + 1e-12))


def _batches(samples: int, batch_size: int):
    for index, start in enumerate(range(0, samples, batch_size)):
        yield index, min(batch_size, samples - start)


def _covariance_report(total, total_sq, samples, predicted) -> CovarianceOracleReport:
    mean = total / samples
    variance = np.maximum(total_sq / samples - mean ** 2, 0.0)
    standard_errors = np.sqrt(variance / samples)
    n = mean.shape[0]
    diag = np.diag(mean)
    offdiag = mean[~np.eye(n, dtype=bool)]
    offdiag_se = standard_errors[~np.eye(n, dtype=bool)]
    return CovarianceOracleReport(
        empirical=mean,
        predicted_diag=predicted,
        max_offdiag_abs=float(np.abs(offdiag).max()) if offdiag.size else 0.0,
        max_diag_reldev=float(np.abs(diag / predicted - 1).max()),
        diag_standard_error=float(np.diag(standard_errors).max()),
        offdiag_standard_error=float(offdiag_se.max()) if offdiag_se.size else 0.0,
        samples=samples,
    )


def _check_samples(params: ProblemParams, samples: int):
    if samples < 2:
        raise DomainError(f"oracles need at least 2 samples, got {samples}")
    if params.n < 1:
        raise DomainError("covariance oracles need n >= 1")


def _accumulate(centered, total, total_sq):
    products = np.einsum('bi,bj->bij', centered, centered)
    total += products.sum(axis=0)
    total_sq += (products ** 2).sum(axis=0)


def oracle_lemma1(params: ProblemParams, ensemble: str, samples: int, seed: int,
                  batch_size: Optional[int] = None) -> CovarianceOracleReport:
    """
    Averaged covariance of restricted ensemble A

    Predicted: (1 + k beta_min^2 (1 - k/p)) I for any zero-mean unit-variance ensemble.
    """
    _check_samples(params, samples)
    batch_size = batch_size or settings.ORACLE_BATCH_SIZE
    n, p, k, beta = params.n, params.p, params.k, params.beta_min
    rows = support_index_array(p, k)
    total = np.zeros((n, n))
    total_sq = np.zeros((n, n))

    for index, size in _batches(samples, batch_size):
        X = draw_entries(substream(seed, index, Purpose.MATRIX), ensemble, params.gamma, (size, n, p))
        chosen = rows[substream(seed, index, Purpose.SUPPORT).integers(rows.shape[0], size=size)]
        indicator = np.zeros((size, p))
        np.put_along_axis(indicator, chosen, 1.0, axis=1)
        noise = substream(seed, index, Purpose.NOISE).standard_normal((size, n))
        Y = beta * np.einsum('bnp,bp->bn', X, indicator) + noise
        mean = beta * (k / p) * X.sum(axis=2)
        _accumulate(Y - mean, total, total_sq)

    predicted = 1 + k * beta ** 2 * (1 - k / p)
    report = _covariance_report(total, total_sq, samples, predicted)
    logger.info(f"Covariance oracle A ({ensemble}): predicted {predicted:.6g}, "
                f"max diag reldev {report.max_diag_reldev:.4g}")
    return report


def oracle_lemma2(params: ProblemParams, ensemble: str, samples: int, seed: int,
                  batch_size: Optional[int] = None) -> CovarianceOracleReport:
    """
    Averaged covariance of restricted ensemble B over the p - k + 1 candidate columns

    Predicted: (1 + beta_min^2 (1 - 1/(p - k + 1))) I.
    """
    _check_samples(params, samples)
    batch_size = batch_size or settings.ORACLE_BATCH_SIZE
    n, m, beta = params.n, params.reduced_candidates, params.beta_min
    total = np.zeros((n, n))
    total_sq = np.zeros((n, n))

    for index, size in _batches(samples, batch_size):
        X = draw_entries(substream(seed, index, Purpose.MATRIX), ensemble, params.gamma, (size, n, m))
        j_star = substream(seed, index, Purpose.INDEX).integers(m, size=size)
        noise = substream(seed, index, Purpose.NOISE).standard_normal((size, n))
        Y = beta * X[np.arange(size), :, j_star] + noise
        mean = (beta / m) * X.sum(axis=2)
        _accumulate(Y - mean, total, total_sq)

    predicted = 1 + beta ** 2 * (1 - 1 / m)
    report = _covariance_report(total, total_sq, samples, predicted)
    logger.info(f"Covariance oracle B ({ensemble}): predicted {predicted:.6g}, "
                f"max diag reldev {report.max_diag_reldev:.4g}")
    return report


def _density_oracle(location_sets: np.ndarray, columns: int, params: ProblemParams,
                    y_grid: Sequence[float], samples: int, seed: int, predicted: np.ndarray,
                    batch_size: Optional[int]) -> DensityOracleReport:
    grid = np.asarray(y_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("y_grid must be a non-empty list of points")
    if samples < 2:
        raise DomainError(f"oracles need at least 2 samples, got {samples}")
    batch_size = batch_size or settings.ORACLE_BATCH_SIZE
    work = location_sets.shape[0] * grid.size
    batch_size = max(1, min(batch_size, DENSITY_WORK_LIMIT // work))

    total = np.zeros(grid.size)
    total_sq = np.zeros(grid.size)
    for index, size in _batches(samples, batch_size):
        rng = substream(seed, index, Purpose.MATRIX)
        row = draw_entries(rng, Ensemble.SPARSIFIED, params.gamma, (size, columns))
        means = params.beta_min * row[:, location_sets].sum(axis=-1)
        conditional = norm.pdf(grid[None, None, :] - means[:, :, None]).mean(axis=1)
        total += conditional.sum(axis=0)
        total_sq += (conditional ** 2).sum(axis=0)

    empirical = total / samples
    variance = np.maximum(total_sq / samples - empirical ** 2, 0.0)
    return DensityOracleReport(
        grid=grid,
        empirical=empirical,
        predicted=predicted,
        standard_errors=np.sqrt(variance / samples),
        samples=samples,
    )


def oracle_lemma3(params: ProblemParams, y_grid: Sequence[float], samples: int, seed: int,
                  batch_size: Optional[int] = None) -> DensityOracleReport:
    """
    Sparsified-row average of the ensemble-A conditional density against psi1

    The conditional density of one observation given its row x is the
    uniform average over supports S of N(beta_min sum_S x_j, 1).
    """
    rows = support_index_array(params.p, params.k)
    predicted = np.asarray(density(build_psi1(params.k, params.gamma, params.beta_min), y_grid))
    report = _density_oracle(rows, params.p, params, y_grid, samples, seed, predicted, batch_size)
    logger.info(f"Density oracle psi1: max deviation {report.max_abs_deviation:.3g}")
    return report


def oracle_lemma4(params: ProblemParams, y_grid: Sequence[float], samples: int, seed: int,
                  batch_size: Optional[int] = None) -> DensityOracleReport:
    """Same for ensemble B: uniform location among the p - k + 1 candidates, against psi2"""
    m = params.reduced_candidates
    locations = np.arange(m).reshape(m, 1)
    predicted = np.asarray(density(build_psi2(params.gamma, params.beta_min), y_grid))
    report = _density_oracle(locations, m, params, y_grid, samples, seed, predicted, batch_size)
    logger.info(f"Density oracle psi2: max deviation {report.max_abs_deviation:.3g}")
    return report


def default_density_grid(half_width: float = 4.0, step: float = 0.5) -> np.ndarray:
    count = int(round(2 * half_width / step)) + 1
    return np.linspace(-half_width, half_width, count)
