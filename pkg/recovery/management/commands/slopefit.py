"""
Management command to fit growth-law slopes of the thresholds
Usage: python manage.py slopefit --family dense-fixed-k --p-values 64,128,256,512,1024,2048,4096
"""

from recovery.growth import GrowthFamily, fit_slope
from recovery.serializers import SlopefitSerializer

from ._base import RecoveryCommand

SLOPEFIT_COLUMNS = ['family', 'x_label', 'y_label', 'slope', 'intercept', 'r_squared', 'points']


class Command(RecoveryCommand):
    help = 'Least-squares log-log slope of a threshold against its predicted growth'
    serializer_class = SlopefitSerializer
    config_schema = {'family': str, 'p-values': [int], 'k': int}

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--family', type=str, choices=GrowthFamily.values, help='Scaling family')
        parser.add_argument('--p-values', type=str, help='Comma separated dimensions, at least 4')
        parser.add_argument('--k', type=int, help='Fixed sparsity for the fixed-k families (default 4)')

    def execute_validated(self, data):
        report = fit_slope(data['family'], data['p_values'], data['k'])
        self.emit([report.as_record()], SLOPEFIT_COLUMNS, data,
                  metadata={'command': 'slopefit', 'points': report.point_records()})
