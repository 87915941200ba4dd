"""
Measurement ensembles, restricted-ensemble observations and exhaustive ML decoders

Randomness comes from counter-based substreams keyed by
(seed, trial, purpose), so any trial can be regenerated in isolation.
"""

from dataclasses import dataclass
from typing import Optional, Sequence
import logging
import math

import numpy as np
from django.db import models

from core.exceptions import DomainError
from .params import (
    ObservationVector,
    ProblemParams,
    SupportSet,
    support_index_array,
)

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12
# Supports scored per vectorized block in the exhaustive decoder
DECODE_BLOCK = 1 << 15


class Ensemble(models.TextChoices):
    STD_GAUSSIAN = 'std-gaussian', 'Standard Gaussian'
    RADEMACHER = 'rademacher', 'Rademacher'
    UNIFORM = 'uniform', 'Uniform, unit variance'
    SPARSIFIED = 'sparsified', 'Gamma-sparsified Gaussian'


class Restricted(models.TextChoices):
    A = 'A', 'Constant signal on an unknown support'
    B = 'B', 'Single unknown location'


class Purpose(models.IntegerChoices):
    MATRIX = 0
    SUPPORT = 1
    NOISE = 2
    INDEX = 3


def substream(seed: int, *keys: int) -> np.random.Generator:
    """Independent Philox generator for (seed, *keys)"""
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(key) for key in keys))
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(seed: int, *keys: int) -> int:
    """64-bit child seed for an independent experiment under the same master seed"""
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(key) for key in keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def draw_entries(rng: np.random.Generator, ensemble: str, gamma: float, shape) -> np.ndarray:
    """Zero-mean, unit-variance i.i.d. entries of the given ensemble"""
    if ensemble == Ensemble.STD_GAUSSIAN:
        return rng.standard_normal(shape)
    if ensemble == Ensemble.RADEMACHER:
        return 2.0 * rng.integers(0, 2, size=shape) - 1.0
    if ensemble == Ensemble.UNIFORM:
        bound = math.sqrt(3.0)
        return rng.uniform(-bound, bound, size=shape)
    if ensemble == Ensemble.SPARSIFIED:
        if not 0 < gamma <= 1:
            raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
        mask = rng.random(shape) < gamma
        values = rng.standard_normal(shape) / math.sqrt(gamma)
        return np.where(mask, values, 0.0)
    raise DomainError(f"Unknown ensemble {ensemble!r}")


@dataclass(frozen=True)
class MeasurementMatrix:
    data: np.ndarray
    ensemble: str
    seed: int
    gamma: float = 1.0

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if data.ndim != 2:
            raise DomainError("a measurement matrix must be two-dimensional")
        data.flags.writeable = False
        object.__setattr__(self, 'data', data)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def reduced(self, k: int) -> 'MeasurementMatrix':
        """
        Candidate columns of restricted ensemble B

        The last k - 1 locations are revealed and their contribution removed,
        leaving the first p - k + 1 columns.
        """
        if not 1 <= k <= self.cols:
            raise DomainError(f"k must satisfy 1 <= k <= {self.cols}, got {k}")
        return MeasurementMatrix(self.data[:, : self.cols - k + 1], self.ensemble, self.seed, self.gamma)


def sample_matrix(params: ProblemParams, ensemble: str, seed: int,
                  keys: Sequence[int] = ()) -> MeasurementMatrix:
    """n x p matrix, deterministic in (params, ensemble, seed, keys)"""
    rng = substream(seed, *keys, Purpose.MATRIX)
    data = draw_entries(rng, ensemble, params.gamma, (params.n, params.p))
    return MeasurementMatrix(data=data, ensemble=ensemble, seed=seed, gamma=params.gamma)


def _noise(n: int, noise: bool, seed: int, keys: Sequence[int]) -> np.ndarray:
    if not noise:
        return np.zeros(n)
    return substream(seed, *keys, Purpose.NOISE).standard_normal(n)


def observe_a(X: MeasurementMatrix, support: SupportSet, beta_min: float, noise: bool = True,
              seed: int = 0, keys: Sequence[int] = ()) -> ObservationVector:
    """Y = beta_min * sum of the support columns + W"""
    support.validate_for(X.cols)
    signal = beta_min * X.data[:, list(support)].sum(axis=1)
    return ObservationVector(values=signal + _noise(X.rows, noise, seed, keys), noise_realized=noise)


def observe_b(X: MeasurementMatrix, j_star: int, beta_min: float, noise: bool = True,
              seed: int = 0, keys: Sequence[int] = ()) -> ObservationVector:
    """Y = beta_min * X_{j*} + W over the reduced matrix"""
    if not 0 <= j_star < X.cols:
        raise DomainError(f"j_star must lie in [0, {X.cols}), got {j_star}")
    signal = beta_min * X.data[:, j_star]
    return ObservationVector(values=signal + _noise(X.rows, noise, seed, keys), noise_realized=noise)


def _first_minimum(residuals: np.ndarray, scale: float) -> int:
    """Index of the first residual within the relative tie tolerance of the minimum"""
    minimum = residuals.min()
    threshold = minimum + TIE_TOLERANCE * max(abs(minimum), scale)
    return int(np.flatnonzero(residuals <= threshold)[0])


def _observation_values(Y) -> np.ndarray:
    return Y.values if isinstance(Y, ObservationVector) else np.asarray(Y, dtype=float)


def decode_a_index(X: MeasurementMatrix, Y, k: int, beta_min: float,
                   cap: Optional[int] = None) -> int:
    """
    Row of support_index_array(p, k) minimizing ||Y - beta_min sum_S X_j||^2

    Scores every support through the Gram form
    ||Y||^2 - 2 beta sum_S c_j + beta^2 sum_{S x S} G with c = X'Y, G = X'X.
    """
    y = _observation_values(Y)
    rows = support_index_array(X.cols, k, cap)
    correlations = X.data.T @ y
    gram = X.data.T @ X.data
    energy = float(y @ y)

    residuals = np.empty(rows.shape[0])
    for start in range(0, rows.shape[0], DECODE_BLOCK):
        block = rows[start:start + DECODE_BLOCK]
        linear = correlations[block].sum(axis=1)
        quadratic = gram[block[:, :, None], block[:, None, :]].sum(axis=(1, 2))
        residuals[start:start + DECODE_BLOCK] = energy - 2 * beta_min * linear + beta_min ** 2 * quadratic
    return _first_minimum(residuals, energy)


def ml_decode_a(X: MeasurementMatrix, Y, k: int, beta_min: float,
                cap: Optional[int] = None) -> SupportSet:
    """Exhaustive ML support estimate; ties go to the lexicographically first support"""
    index = decode_a_index(X, Y, k, beta_min, cap)
    return SupportSet(tuple(int(i) for i in support_index_array(X.cols, k, cap)[index]))


def ml_decode_b(X: MeasurementMatrix, Y_tilde, beta_min: float) -> int:
    """argmin_j ||Y - beta_min X_j||^2 over the reduced columns; lowest index on ties"""
    if X.cols < 1:
        raise DomainError("restricted ensemble B needs at least one candidate column")
    y = _observation_values(Y_tilde)
    residuals = ((y[:, None] - beta_min * X.data) ** 2).sum(axis=0)
    return _first_minimum(residuals, float(y @ y))
