"""
Problem parameters, support combinatorics, signals and observations
Shared by the bounds, mixture and simulation modules
"""

from dataclasses import dataclass, field, replace, asdict
from functools import lru_cache
from itertools import chain, combinations
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Tuple
import math
import numbers

import numpy as np
from django.conf import settings
from django.db import models
from scipy.special import gammaln

from core.exceptions import CapacityError, DomainError

# Below this many factors C(p, k) is formed exactly before taking the log
EXACT_COMBINATION_LIMIT = 1000


def _require_integer(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class ProblemParams:
    """The tuple (n, p, k, beta_min, gamma) with unit noise variance"""

    n: int
    p: int
    k: int
    beta_min: float
    gamma: float = 1.0
    noise_var: float = 1.0

    def __post_init__(self):
        n = _require_integer('n', self.n)
        p = _require_integer('p', self.p)
        k = _require_integer('k', self.k)
        if n < 0:
            raise DomainError(f"n must be non-negative, got {n}")
        if p < 1:
            raise DomainError(f"p must be positive, got {p}")
        if not 1 <= k <= p:
            raise DomainError(f"k must satisfy 1 <= k <= p, got k={k}, p={p}")
        beta_min = float(self.beta_min)
        gamma = float(self.gamma)
        if not math.isfinite(beta_min) or beta_min < 0:
            raise DomainError(f"beta_min must be a finite non-negative number, got {self.beta_min!r}")
        if not 0 < gamma <= 1:
            raise DomainError(f"gamma must lie in (0, 1], got {self.gamma!r}")
        if float(self.noise_var) != 1.0:
            raise DomainError(
                f"noise variance is normalized to 1; got {self.noise_var!r}. "
                "Rescale beta_min instead."
            )
        object.__setattr__(self, 'n', n)
        object.__setattr__(self, 'p', p)
        object.__setattr__(self, 'k', k)
        object.__setattr__(self, 'beta_min', beta_min)
        object.__setattr__(self, 'gamma', gamma)
        object.__setattr__(self, 'noise_var', 1.0)

    @property
    def beta_min_sq(self) -> float:
        return self.beta_min ** 2

    @property
    def gamma_k(self) -> float:
        return self.gamma * self.k

    @property
    def reduced_candidates(self) -> int:
        """Number of locations left to the decoder of restricted ensemble B"""
        return self.p - self.k + 1

    def with_(self, **changes) -> 'ProblemParams':
        return replace(self, **changes)

    def as_dict(self) -> dict:
        data = asdict(self)
        data.pop('noise_var')
        return data


@dataclass(frozen=True)
class SupportSet:
    """Strictly increasing 0-based indices of the nonzero entries"""

    indices: Tuple[int, ...]

    def __post_init__(self):
        indices = tuple(_require_integer('support index', i) for i in self.indices)
        if any(i < 0 for i in indices):
            raise DomainError(f"support indices must be non-negative: {indices}")
        if any(a >= b for a, b in zip(indices, indices[1:])):
            raise DomainError(f"support indices must be strictly increasing: {indices}")
        object.__setattr__(self, 'indices', indices)

    @classmethod
    def of(cls, indices: Iterable[int], p: int) -> 'SupportSet':
        support = cls(tuple(sorted(indices)))
        support.validate_for(p)
        return support

    @property
    def size(self) -> int:
        return len(self.indices)

    def validate_for(self, p: int) -> None:
        if self.indices and self.indices[-1] >= p:
            raise DomainError(f"support {self.indices} does not fit dimension {p}")

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)

    def __str__(self):
        return '{' + ','.join(str(i) for i in self.indices) + '}'


@dataclass(frozen=True)
class SparseSignal:
    """A p-dimensional vector stored as index -> value"""

    dimension: int
    entries: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {int(i): float(v) for i, v in sorted(self.entries.items()) if v != 0}
        if any(not 0 <= i < self.dimension for i in cleaned):
            raise DomainError(f"signal entries fall outside dimension {self.dimension}")
        object.__setattr__(self, 'entries', MappingProxyType(cleaned))

    @property
    def support(self) -> SupportSet:
        return SupportSet(tuple(self.entries))

    @property
    def sparsity(self) -> int:
        return len(self.entries)

    def in_class(self, beta_min: float, k: Optional[int] = None) -> bool:
        """Membership in C(beta_min), optionally with exactly k nonzeros"""
        if k is not None and self.sparsity != k:
            return False
        return all(abs(v) >= beta_min for v in self.entries.values())

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dimension)
        for i, v in self.entries.items():
            dense[i] = v
        return dense


@dataclass(frozen=True)
class ObservationVector:
    """Observed n-vector and whether noise was added"""

    values: np.ndarray
    noise_realized: bool

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise DomainError("observations must be a vector")
        values.flags.writeable = False
        object.__setattr__(self, 'values', values)

    @property
    def length(self) -> int:
        return self.values.shape[0]


def log_choose(p: int, k: int) -> float:
    """
    Natural log of the binomial coefficient C(p, k)

    Exact integer arithmetic for moderate min(k, p - k), log-gamma beyond.
    Symmetric in k <-> p - k by construction.
    """
    p = _require_integer('p', p)
    k = _require_integer('k', k)
    if p < 0 or k < 0 or k > p:
        raise DomainError(f"log_choose needs 0 <= k <= p, got p={p}, k={k}")

    m = min(k, p - k)
    if m == 0:
        return 0.0
    if m <= EXACT_COMBINATION_LIMIT:
        return math.log(math.comb(p, m))
    return float(gammaln(p + 1) - gammaln(m + 1) - gammaln(p - m + 1))


def rate(n: int, p: int, k: int) -> float:
    """Nats of support uncertainty per measurement, log C(p, k) / n"""
    n = _require_integer('n', n)
    if n < 1:
        raise DomainError(f"rate needs at least one measurement, got n={n}")
    return log_choose(p, k) / n


def _check_capacity(p: int, k: int, cap: Optional[int]) -> int:
    cap = settings.ENUMERATION_CAP if cap is None else cap
    count = math.comb(p, k)
    if count > cap:
        raise CapacityError(count, cap)
    return count


def enumerate_supports(p: int, k: int, cap: Optional[int] = None) -> Tuple[SupportSet, ...]:
    """All k-subsets of {0..p-1} in lexicographic order"""
    p = _require_integer('p', p)
    k = _require_integer('k', k)
    if p < 0 or k < 0 or k > p:
        raise DomainError(f"enumerate_supports needs 0 <= k <= p, got p={p}, k={k}")
    _check_capacity(p, k, cap)
    return tuple(SupportSet(c) for c in combinations(range(p), k))


@lru_cache(maxsize=32)
def _support_index_array(p: int, k: int) -> np.ndarray:
    count = math.comb(p, k)
    flat = np.fromiter(chain.from_iterable(combinations(range(p), k)), dtype=np.intp, count=count * k)
    array = flat.reshape(count, k)
    array.flags.writeable = False
    return array


def support_index_array(p: int, k: int, cap: Optional[int] = None) -> np.ndarray:
    """
    The lexicographic enumeration as a read-only (C(p, k), k) index array

    Row r holds the r-th support of enumerate_supports(p, k).
    """
    p = _require_integer('p', p)
    k = _require_integer('k', k)
    if p < 0 or k < 0 or k > p:
        raise DomainError(f"support_index_array needs 0 <= k <= p, got p={p}, k={k}")
    _check_capacity(p, k, cap)
    return _support_index_array(p, k)


def make_constant_signal(support: SupportSet, beta_min: float, p: int) -> SparseSignal:
    """Signal equal to beta_min on the support and zero elsewhere"""
    support.validate_for(p)
    if beta_min <= 0:
        raise DomainError(f"beta_min must be positive, got {beta_min}")
    return SparseSignal(dimension=p, entries={i: float(beta_min) for i in support})


class Regime(models.TextChoices):
    """Behaviour of the sparsified-ensemble bounds as a function of gamma * k"""
    DENSE_LIKE = 'DenseLike', 'Dense-like (gamma k > 3)'
    TRANSITIONAL = 'Transitional', 'Transitional (1 < gamma k <= 3)'
    DEGRADED = 'Degraded', 'Degraded (gamma k <= 1)'


def classify_regime(k: int, gamma: float) -> Regime:
    k = _require_integer('k', k)
    if k < 1 or not 0 < gamma <= 1:
        raise DomainError(f"classify_regime needs k >= 1 and gamma in (0, 1], got k={k}, gamma={gamma}")
    gamma_k = gamma * k
    if gamma_k > 3:
        return Regime.DENSE_LIKE
    if gamma_k > 1:
        return Regime.TRANSITIONAL
    return Regime.DEGRADED
