"""
Management command to sweep one parameter and tabulate the bounds
Usage: python manage.py sweep --variable gamma --start 0.001 --stop 1 --count 31 --spacing log
"""

from recovery.serializers import SweepSerializer
from recovery.sweeps import run_sweep

from ._base import RecoveryCommand
from .bounds import BOUNDS_COLUMNS, PARAMS_SCHEMA

SWEEP_COLUMNS = BOUNDS_COLUMNS + ['rate_at_threshold', 'defaults_used']


class Command(RecoveryCommand):
    help = 'Sweep gamma, n, p or beta_min and write one bound row per value'
    serializer_class = SweepSerializer
    config_schema = {
        **PARAMS_SCHEMA,
        'variable': str,
        'values': [float],
        'start': float,
        'stop': float,
        'count': int,
        'spacing': str,
        'tolerance': float,
    }

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--variable', type=str, choices=['gamma', 'n', 'p', 'beta_min'],
                            help='Parameter to sweep')
        parser.add_argument('--values', type=str, help='Comma separated values')
        parser.add_argument('--start', type=float, help='First value of a range')
        parser.add_argument('--stop', type=float, help='Last value of a range')
        parser.add_argument('--count', type=int, help='Number of values in the range')
        parser.add_argument('--spacing', type=str, choices=['linear', 'log'], help='Range spacing (default linear)')
        self.add_params_arguments(parser)
        parser.add_argument('--tolerance', type=float, help='Entropy quadrature tolerance (default 1e-8)')

    def execute_validated(self, data):
        spec = data['sweep']
        records = run_sweep(spec, data.get('tolerance'))
        self.emit(records, SWEEP_COLUMNS, data, metadata={'command': 'sweep', **spec.metadata})
