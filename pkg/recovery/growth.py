"""
Growth-law checks: log-log least-squares slopes of thresholds against their
predicted scaling along one-parameter families of problems
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple
import logging
import math

import numpy as np
from django.db import models
from scipy.stats import linregress

from core.exceptions import UsageError
from .bounds import corollary_bounds, f2
from .params import ProblemParams

logger = logging.getLogger(__name__)

MIN_POINTS = 4
FIXED_K = 4


class GrowthFamily(models.TextChoices):
    DENSE_FIXED_K = 'dense-fixed-k', 'Dense, fixed k, f2 against k ln(p - k)'
    DENSE_LINEAR = 'dense-linear', 'Dense, k = ceil(p/4), f2 against p ln p'
    SPARSE_FIXED_K = 'sparse-fixed-k', 'Sparse, fixed k, gamma = 1/(k ln k), corollary bound'


@dataclass(frozen=True)
class SlopeFitReport:
    family: str
    x_label: str
    y_label: str
    slope: float
    intercept: float
    r_squared: float
    points: Tuple[Tuple[float, float], ...]

    def as_record(self) -> dict:
        return {
            'family': str(self.family),
            'x_label': self.x_label,
            'y_label': self.y_label,
            'slope': self.slope,
            'intercept': self.intercept,
            'r_squared': self.r_squared,
            'points': len(self.points),
        }

    def point_records(self) -> List[dict]:
        return [{'x': x, 'y': y} for x, y in self.points]


def family_point(family: str, p: int, k: int = FIXED_K) -> Tuple[float, float]:
    """
    (predicted growth, threshold) for one p of the family

    beta_min^2 = 1/k in every family.
    """
    if family == GrowthFamily.DENSE_LINEAR:
        k = math.ceil(p / 4)
    if p - k + 1 < 2:
        raise UsageError(f"p = {p} is too small for {family} (k = {k})")
    beta_min = math.sqrt(1 / k)

    if family == GrowthFamily.DENSE_FIXED_K:
        return k * math.log(p - k), f2(p, k, beta_min)
    if family == GrowthFamily.DENSE_LINEAR:
        return p * math.log(p), f2(p, k, beta_min)
    if family == GrowthFamily.SPARSE_FIXED_K:
        if k < 2:
            raise UsageError("the sparse family needs k >= 2 so that gamma = 1/(k ln k) is defined")
        gamma = 1 / (k * math.log(k))
        bounds = corollary_bounds(ProblemParams(n=1, p=p, k=k, beta_min=beta_min, gamma=gamma))
        predicted = k * math.log(p - k) / (gamma * k * math.log(1 / gamma))
        return predicted, max(bounds.g1_lower, bounds.g2_lower)
    raise UsageError(f"Unknown growth family {family!r}")


def _labels(family: str) -> Tuple[str, str]:
    return {
        GrowthFamily.DENSE_FIXED_K: ('k ln(p - k)', 'f2'),
        GrowthFamily.DENSE_LINEAR: ('p ln p', 'f2'),
        GrowthFamily.SPARSE_FIXED_K: ('k ln(p - k) / (gamma k ln(1/gamma))', 'max(g1_lower, g2_lower)'),
    }[family]


def fit_slope(family: str, p_values: Sequence[int], k: int = FIXED_K) -> SlopeFitReport:
    """Least-squares slope of ln(threshold) against ln(predicted growth)"""
    if family not in GrowthFamily.values:
        raise UsageError(f"Unknown growth family {family!r}")
    p_values = sorted({int(p) for p in p_values})
    if len(p_values) < MIN_POINTS:
        raise UsageError(f"A slope fit needs at least {MIN_POINTS} distinct p values, got {len(p_values)}")

    points = tuple(family_point(family, p, k) for p in p_values)
    if any(x <= 0 or y <= 0 for x, y in points):
        raise UsageError("Thresholds and predicted growth must be positive on a log-log fit; raise the p values")

    log_x = np.log([x for x, _ in points])
    log_y = np.log([y for _, y in points])
    fit = linregress(log_x, log_y)
    x_label, y_label = _labels(family)
    report = SlopeFitReport(
        family=family,
        x_label=x_label,
        y_label=y_label,
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=min(1.0, float(fit.rvalue) ** 2),
        points=points,
    )
    logger.info(f"Slope fit {family}: slope={report.slope:.4f}, r^2={report.r_squared:.5f}")
    return report
