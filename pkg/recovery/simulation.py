"""
Monte Carlo estimation of the ML decoder's error probability
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple
import logging
import math

from celery import group
from django.conf import settings

from core.exceptions import DomainError
from core.utils import wilson_interval
from .ensembles import (
    Ensemble,
    Purpose,
    Restricted,
    decode_a_index,
    ml_decode_b,
    observe_a,
    observe_b,
    sample_matrix,
    substream,
)
from .params import ProblemParams, SupportSet, support_index_array

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MonteCarloResult:
    trials: int
    errors: int
    p_hat: float
    ci_low: float
    ci_high: float
    seed: int
    ensemble: str
    which: str = Restricted.A
    noise: bool = True

    @property
    def standard_error(self) -> float:
        return math.sqrt(self.p_hat * (1 - self.p_hat) / self.trials)


def run_trials(params: ProblemParams, ensemble: str, which: str, seed: int,
               start: int, stop: int, noise: bool = True) -> int:
    """
    Count decoding errors over trials [start, stop)

    Trial t draws its matrix, support (or location) and noise from the
    substreams (seed, t, purpose) only.
    """
    errors = 0
    if which == Restricted.A:
        rows = support_index_array(params.p, params.k)
        for trial in range(start, stop):
            X = sample_matrix(params, ensemble, seed, keys=(trial,))
            truth = int(substream(seed, trial, Purpose.SUPPORT).integers(rows.shape[0]))
            support = SupportSet(tuple(int(i) for i in rows[truth]))
            Y = observe_a(X, support, params.beta_min, noise, seed, keys=(trial,))
            if decode_a_index(X, Y, params.k, params.beta_min) != truth:
                errors += 1
    elif which == Restricted.B:
        candidates = params.reduced_candidates
        for trial in range(start, stop):
            X = sample_matrix(params, ensemble, seed, keys=(trial,)).reduced(params.k)
            j_star = int(substream(seed, trial, Purpose.INDEX).integers(candidates))
            Y = observe_b(X, j_star, params.beta_min, noise, seed, keys=(trial,))
            if ml_decode_b(X, Y, params.beta_min) != j_star:
                errors += 1
    else:
        raise DomainError(f"Unknown restricted ensemble {which!r}")
    return errors


def trial_chunks(trials: int, chunk_size: int) -> List[Tuple[int, int]]:
    return [(start, min(start + chunk_size, trials)) for start in range(0, trials, chunk_size)]


def monte_carlo_error(params: ProblemParams, ensemble: str, which: str, trials: int, seed: int,
                      noise: bool = True, chunk_size: Optional[int] = None) -> MonteCarloResult:
    """
    Empirical error probability of the exhaustive ML decoder

    Trials are split into chunks executed as a Celery group (in-process when
    eager); chunk counts are summed in chunk order.
    """
    if trials < 1:
        raise DomainError(f"trials must be at least 1, got {trials}")
    if ensemble not in Ensemble.values:
        raise DomainError(f"Unknown ensemble {ensemble!r}")
    if which not in Restricted.values:
        raise DomainError(f"Unknown restricted ensemble {which!r}")
    if which == Restricted.A:
        support_index_array(params.p, params.k)

    chunk_size = chunk_size or settings.MONTE_CARLO_CHUNK_SIZE
    chunks = trial_chunks(trials, chunk_size)
    logger.info(
        f"Monte Carlo: {trials} trials of ensemble {which} ({ensemble}) at {params} "
        f"in {len(chunks)} chunks, seed {seed}"
    )

    from .tasks import run_trial_chunk

    job = group(
        run_trial_chunk.s(params.as_dict(), str(ensemble), str(which), int(seed), start, stop, noise)
        for start, stop in chunks
    )
    results = job.apply_async().get()
    errors = sum(result['errors'] for result in sorted(results, key=lambda r: r['start']))

    ci_low, ci_high = wilson_interval(errors, trials)
    p_hat = errors / trials
    logger.info(f"Monte Carlo finished: {errors}/{trials} errors, p_hat={p_hat:.4f}")
    return MonteCarloResult(
        trials=trials,
        errors=errors,
        p_hat=p_hat,
        ci_low=min(ci_low, p_hat),
        ci_high=max(ci_high, p_hat),
        seed=int(seed),
        ensemble=str(ensemble),
        which=str(which),
        noise=noise,
    )
