"""
Serializer fields shared by the command serializers
"""

from rest_framework import serializers

from core.exceptions import UsageError
from core.utils import SEED_LIMIT, parse_seed


class SeedField(serializers.IntegerField):
    """64-bit unsigned seed"""

    def __init__(self, **kwargs):
        kwargs.setdefault('min_value', 0)
        kwargs.setdefault('max_value', SEED_LIMIT - 1)
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail('invalid')
        try:
            return parse_seed(data)
        except UsageError as exc:
            raise serializers.ValidationError(str(exc))


class CommaSeparatedListField(serializers.ListField):
    """
    List field that also accepts one comma separated string

    Used for flags such as --values 0.1,0.5,1 and --scope lemma1,lemma6
    """

    def to_internal_value(self, data):
        if isinstance(data, str):
            data = [item.strip() for item in data.split(',') if item.strip()]
        elif isinstance(data, (list, tuple)):
            flattened = []
            for item in data:
                if isinstance(item, str):
                    flattened.extend(part.strip() for part in item.split(',') if part.strip())
                else:
                    flattened.append(item)
            data = flattened
        return super().to_internal_value(data)
