"""
Management command to estimate the ML decoder's error by Monte Carlo
Usage: python manage.py simulate --p 12 --k 2 --beta-min-sq 0.1 --n 20 --trials 2000 --seed 7
"""

from recovery.bounds import (
    fano_error_lower_a,
    fano_error_lower_b,
    fano_error_lower_sparse_a,
    fano_error_lower_sparse_b,
)
from recovery.ensembles import Ensemble, Restricted
from recovery.serializers import SimulateSerializer
from recovery.simulation import monte_carlo_error

from ._base import RecoveryCommand
from .bounds import PARAMS_SCHEMA

SIMULATE_COLUMNS = [
    'p', 'k', 'beta_min', 'gamma', 'n', 'trials', 'errors', 'p_hat', 'ci_low', 'ci_high',
    'fano_lower', 'seed', 'ensemble', 'restricted', 'noiseless', 'standard_error',
]


def fano_floor(params, ensemble, restricted, noiseless):
    """Any-decoder error floor matching the simulated ensemble; None without noise"""
    if noiseless:
        return None
    if ensemble == Ensemble.SPARSIFIED:
        if restricted == Restricted.A:
            return fano_error_lower_sparse_a(params)
        return fano_error_lower_sparse_b(params)
    if restricted == Restricted.A:
        return fano_error_lower_a(params)
    return fano_error_lower_b(params)


class Command(RecoveryCommand):
    help = 'Monte Carlo error of the exhaustive ML decoder on restricted ensemble A or B'
    serializer_class = SimulateSerializer
    config_schema = {
        **PARAMS_SCHEMA,
        'trials': int,
        'seed': str,
        'ensemble': str,
        'restricted': str,
        'noiseless': bool,
        'chunk-size': int,
    }

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_params_arguments(parser, n_required=True)
        parser.add_argument('--trials', type=int, help='Number of trials')
        parser.add_argument('--seed', type=str, help='64-bit unsigned master seed (required)')
        parser.add_argument('--ensemble', type=str, choices=Ensemble.values, help='Measurement ensemble')
        parser.add_argument('--restricted', type=str, choices=Restricted.values, help='Restricted ensemble A or B')
        parser.add_argument('--noiseless', action='store_true', default=None, help='Decode without noise')
        parser.add_argument('--chunk-size', type=int, help='Trials per task')

    def execute_validated(self, data):
        params = data['params']
        result = monte_carlo_error(
            params,
            data['ensemble'],
            data['restricted'],
            data['trials'],
            data['seed'],
            noise=not data['noiseless'],
            chunk_size=data.get('chunk_size'),
        )
        record = params.as_dict()
        record.update({
            'trials': result.trials,
            'errors': result.errors,
            'p_hat': result.p_hat,
            'ci_low': result.ci_low,
            'ci_high': result.ci_high,
            'fano_lower': fano_floor(params, data['ensemble'], data['restricted'], data['noiseless']),
            'seed': result.seed,
            'ensemble': result.ensemble,
            'restricted': result.which,
            'noiseless': data['noiseless'],
            'standard_error': result.standard_error,
        })
        self.emit([record], SIMULATE_COLUMNS, data, metadata={'command': 'simulate'})
