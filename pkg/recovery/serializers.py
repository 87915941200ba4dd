"""
DRF serializers for command flags
Validate merged flag/config values and build domain objects
"""

import math

from django.conf import settings
from rest_framework import serializers

from core.exceptions import SupportRecoveryException
from core.fields import CommaSeparatedListField, SeedField
from .ensembles import Ensemble, Restricted
from .growth import GrowthFamily, MIN_POINTS, FIXED_K
from .params import ProblemParams
from .sweeps import Spacing, SweepSpec, SweepVariable
from .verification import Scope, parse_scopes


class OutputSerializer(serializers.Serializer):
    """Rendering flags shared by every command"""

    format = serializers.ChoiceField(choices=['csv', 'json'], default='csv')
    out = serializers.CharField(required=False, allow_blank=True, default='')


class ProblemParamsSerializer(OutputSerializer):
    """(n, p, k, beta_min | beta_min_sq, gamma) with cross-field checks"""

    p = serializers.IntegerField(min_value=1)
    k = serializers.IntegerField(min_value=1)
    n = serializers.IntegerField(min_value=0, default=1)
    beta_min = serializers.FloatField(min_value=0, required=False)
    beta_min_sq = serializers.FloatField(min_value=0, required=False)
    gamma = serializers.FloatField(default=1.0)

    def validate_gamma(self, value):
        """Measurement sparsity lies in (0, 1]"""
        if not 0 < value <= 1:
            raise serializers.ValidationError("gamma must lie in (0, 1]")
        return value

    def validate(self, data):
        beta_min = data.pop('beta_min', None)
        beta_min_sq = data.pop('beta_min_sq', None)
        if beta_min is None and beta_min_sq is None:
            raise serializers.ValidationError({'beta_min': "Provide --beta-min or --beta-min-sq"})
        if beta_min is not None and beta_min_sq is not None and not math.isclose(
                beta_min ** 2, beta_min_sq, rel_tol=1e-12, abs_tol=1e-15):
            raise serializers.ValidationError("--beta-min and --beta-min-sq disagree")
        data['beta_min'] = beta_min if beta_min is not None else math.sqrt(beta_min_sq)

        if data['k'] > data['p']:
            raise serializers.ValidationError({'k': "k must not exceed p"})
        try:
            data['params'] = ProblemParams(
                n=data['n'], p=data['p'], k=data['k'],
                beta_min=data['beta_min'], gamma=data['gamma'],
            )
        except SupportRecoveryException as e:
            raise serializers.ValidationError(str(e))
        return data


class BoundsSerializer(ProblemParamsSerializer):
    tolerance = serializers.FloatField(required=False, min_value=1e-15)


class SimulateSerializer(ProblemParamsSerializer):
    n = serializers.IntegerField(min_value=0)
    trials = serializers.IntegerField(min_value=1)
    seed = SeedField()
    ensemble = serializers.ChoiceField(choices=Ensemble.choices, default=Ensemble.STD_GAUSSIAN)
    restricted = serializers.ChoiceField(choices=Restricted.choices, default=Restricted.A)
    noiseless = serializers.BooleanField(default=False)
    chunk_size = serializers.IntegerField(min_value=1, required=False)


class SweepSerializer(OutputSerializer):
    """
    One swept variable with either explicit values or a (start, stop, count, spacing) range

    Fixed parameters that are not given fall back to FIGURE_DEFAULTS and are
    listed in the output metadata.
    """

    variable = serializers.ChoiceField(choices=SweepVariable.choices)
    values = CommaSeparatedListField(child=serializers.FloatField(), required=False)
    start = serializers.FloatField(required=False)
    stop = serializers.FloatField(required=False)
    count = serializers.IntegerField(min_value=1, required=False)
    spacing = serializers.ChoiceField(choices=Spacing.choices, default=Spacing.LINEAR)
    p = serializers.IntegerField(min_value=1, required=False)
    k = serializers.IntegerField(min_value=1, required=False)
    n = serializers.IntegerField(min_value=0, required=False)
    beta_min = serializers.FloatField(min_value=0, required=False)
    beta_min_sq = serializers.FloatField(min_value=0, required=False)
    gamma = serializers.FloatField(required=False)
    tolerance = serializers.FloatField(required=False, min_value=1e-15)

    def validate(self, data):
        if 'beta_min' not in data and 'beta_min_sq' in data:
            data['beta_min'] = math.sqrt(data['beta_min_sq'])

        defaults = settings.FIGURE_DEFAULTS
        fixed = {}
        defaults_used = []
        for name in ('n', 'p', 'k', 'beta_min', 'gamma'):
            if name in data:
                fixed[name] = data[name]
            else:
                fixed[name] = defaults[name]
                if name != data['variable']:
                    defaults_used.append(name)

        has_values = 'values' in data
        has_range = all(name in data for name in ('start', 'stop', 'count'))
        if has_values == has_range:
            raise serializers.ValidationError(
                "Give either --values or all of --start, --stop and --count"
            )

        try:
            base = ProblemParams(**fixed)
            if has_values:
                if not data['values']:
                    raise serializers.ValidationError({'values': "The list of values is empty"})
                data['sweep'] = SweepSpec(variable=data['variable'], values=tuple(data['values']),
                                          fixed=base, defaults_used=tuple(defaults_used))
            else:
                data['sweep'] = SweepSpec.from_range(data['variable'], data['start'], data['stop'],
                                                     data['count'], data['spacing'], base, defaults_used)
        except SupportRecoveryException as e:
            raise serializers.ValidationError(str(e))
        return data


class VerifyLemmasSerializer(OutputSerializer):
    scope = CommaSeparatedListField(child=serializers.CharField(), allow_empty=False,
                                    default=lambda: list(Scope.values))
    seed = SeedField()
    covariance_samples = serializers.IntegerField(min_value=2, required=False)
    density_samples = serializers.IntegerField(min_value=2, required=False)

    def validate_scope(self, value):
        try:
            return parse_scopes(value)
        except SupportRecoveryException as e:
            raise serializers.ValidationError(str(e))


class SlopefitSerializer(OutputSerializer):
    family = serializers.ChoiceField(choices=GrowthFamily.choices)
    p_values = CommaSeparatedListField(child=serializers.IntegerField(min_value=2), min_length=MIN_POINTS)
    k = serializers.IntegerField(min_value=1, default=FIXED_K)
