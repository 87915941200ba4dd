"""
Management command to evaluate every necessary-condition bound at one point
Usage: python manage.py bounds --p 4 --k 2 --beta-min 1 --gamma 0.25
"""

from recovery.bounds import evaluate_bounds
from recovery.serializers import BoundsSerializer

from ._base import RecoveryCommand

BOUNDS_COLUMNS = [
    'p', 'k', 'beta_min', 'gamma', 'n', 'f1', 'f2', 'k_minus_1', 'dense_threshold',
    'g1', 'g2', 'sparse_threshold', 'H_psi1', 'H_psi2', 'regime', 'g1_lower', 'g2_lower',
    'corollary_case', 'g1_general', 'g2_general',
    'g1_bracket_low', 'g1_bracket_high', 'g2_bracket_low', 'g2_bracket_high',
]

PARAMS_SCHEMA = {
    'p': int,
    'k': int,
    'n': int,
    'beta-min': float,
    'beta-min-sq': float,
    'gamma': float,
}


class Command(RecoveryCommand):
    help = 'Evaluate dense, sparse and corollary thresholds for one parameter point'
    serializer_class = BoundsSerializer
    config_schema = {**PARAMS_SCHEMA, 'tolerance': float}

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_params_arguments(parser)
        parser.add_argument('--tolerance', type=float, help='Entropy quadrature tolerance (default 1e-8)')

    def execute_validated(self, data):
        report = evaluate_bounds(data['params'], data.get('tolerance'))
        self.emit([report.as_record()], BOUNDS_COLUMNS, data, metadata={'command': 'bounds'})
