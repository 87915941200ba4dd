"""
Celery tasks for Monte Carlo campaigns
"""

from celery import shared_task
from celery.utils.log import get_task_logger

from .params import ProblemParams
from .simulation import run_trials

logger = get_task_logger(__name__)


@shared_task(bind=True)
def run_trial_chunk(self, params, ensemble, which, seed, start, stop, noise=True):
    """
    Decode trials [start, stop) and report the error count

    Args:
        params: ProblemParams fields as a dict
        ensemble: Ensemble value
        which: Restricted ensemble, 'A' or 'B'
        seed: Master seed
        start, stop: Trial index range
        noise: Whether observations carry noise

    Returns:
        Dict with the range and its error count
    """
    errors = run_trials(ProblemParams(**params), ensemble, which, seed, start, stop, noise)
    logger.debug(f"Trials {start}-{stop} of seed {seed}: {errors} errors")
    return {'start': start, 'stop': stop, 'errors': errors}
