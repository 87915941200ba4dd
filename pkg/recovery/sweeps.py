"""
One-variable parameter sweeps of the bound report
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
from django.conf import settings
from django.db import models

from core.exceptions import UsageError
from .bounds import evaluate_bounds
from .params import ProblemParams, log_choose

logger = logging.getLogger(__name__)

INTEGER_VARIABLES = ('n', 'p')


class SweepVariable(models.TextChoices):
    GAMMA = 'gamma', 'gamma'
    N = 'n', 'n'
    P = 'p', 'p'
    BETA_MIN = 'beta_min', 'beta_min'


class Spacing(models.TextChoices):
    LINEAR = 'linear', 'Linear'
    LOG = 'log', 'Logarithmic'


@dataclass(frozen=True)
class SweepSpec:
    """Values of one variable swept with every other parameter held at `fixed`"""

    variable: str
    values: Tuple[float, ...]
    fixed: ProblemParams
    defaults_used: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.variable not in SweepVariable.values:
            raise UsageError(f"Unknown sweep variable {self.variable!r}")
        if not self.values:
            raise UsageError("A sweep needs at least one value")
        values = tuple(_coerce(self.variable, v) for v in self.values)
        object.__setattr__(self, 'values', values)
        for value in values:
            self.point(value)

    @classmethod
    def from_range(cls, variable: str, start: float, stop: float, count: int,
                   spacing: str, fixed: ProblemParams, defaults_used=()) -> 'SweepSpec':
        """
        Evenly spaced sweep from start to stop

        Integer variables are rounded and repeats dropped, keeping the
        requested direction, so fewer than count values may remain.
        """
        if count < 1:
            raise UsageError(f"A sweep needs a positive count, got {count}")
        if spacing == Spacing.LOG:
            if start <= 0 or stop <= 0:
                raise UsageError("Log spacing needs positive endpoints")
            values = np.geomspace(start, stop, count)
        elif spacing == Spacing.LINEAR:
            values = np.linspace(start, stop, count)
        else:
            raise UsageError(f"Unknown spacing {spacing!r}")
        if variable in INTEGER_VARIABLES:
            rounded = np.round(values).astype(int).tolist()
            values = np.asarray(list(dict.fromkeys(rounded)), dtype=int)
            if len(values) < count:
                logger.warning(f"{variable} range {start}..{stop} rounds to {len(values)} distinct values, not {count}")
        return cls(variable=variable, values=tuple(values.tolist()), fixed=fixed,
                   defaults_used=tuple(defaults_used))

    def point(self, value) -> ProblemParams:
        return self.fixed.with_(**{self.variable: value})

    @property
    def points(self) -> List[ProblemParams]:
        return [self.point(value) for value in self.values]

    @property
    def metadata(self) -> Dict[str, object]:
        return {
            'variable': str(self.variable),
            'count': len(self.values),
            'fixed': self.fixed.as_dict(),
            'defaults_used': list(self.defaults_used),
        }


def _coerce(variable: str, value):
    if variable in INTEGER_VARIABLES:
        if float(value) != int(round(float(value))):
            raise UsageError(f"{variable} must take integer values, got {value!r}")
        return int(round(float(value)))
    return float(value)


def run_sweep(spec: SweepSpec, tol: Optional[float] = None) -> List[dict]:
    """
    One bound record per sweep value, in sweep order

    Each record adds rate_at_threshold = log C(p, k) / sparse_threshold,
    left empty when the threshold is not positive.
    """
    records = []
    defaults_used = ';'.join(spec.defaults_used)
    for params in spec.points:
        record = evaluate_bounds(params, tol).as_record()
        threshold = record['sparse_threshold']
        record['rate_at_threshold'] = log_choose(params.p, params.k) / threshold if threshold > 0 else None
        record['defaults_used'] = defaults_used
        records.append(record)
    logger.info(f"Sweep over {spec.variable}: {len(records)} points")
    return records


def figure_sweep(values: Optional[Sequence[float]] = None, count: int = 31) -> SweepSpec:
    """
    Log-spaced gamma sweep from 1e-3 to 1 at the FIGURE_DEFAULTS point

    Reproduces the qualitative three-regime picture of the rate at the
    sparse threshold.
    """
    defaults = settings.FIGURE_DEFAULTS
    fixed = ProblemParams(n=defaults['n'], p=defaults['p'], k=defaults['k'],
                          beta_min=defaults['beta_min'], gamma=defaults['gamma'])
    used = ('p', 'k', 'beta_min')
    if values is not None:
        return SweepSpec(variable=SweepVariable.GAMMA, values=tuple(values), fixed=fixed, defaults_used=used)
    return SweepSpec.from_range(SweepVariable.GAMMA, 1e-3, 1.0, count, Spacing.LOG, fixed, used)
