from rest_framework import serializers

from core.ioUtils import read_json, write_json

from .datasets import MetricDataset
from .metrics import METRIC_IDS


class MetricDatasetSerializer(serializers.Serializer):
    """{metric_id, q?, seed, points: [[floats]]}; complex coordinates are written as re, im pairs."""
    metric_id = serializers.ChoiceField(choices=METRIC_IDS)
    q = serializers.IntegerField(min_value=2, required=False, allow_null=True)
    seed = serializers.IntegerField(required=False, allow_null=True)
    points = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=1),
        source='point_rows',
    )
    metadata = serializers.DictField(required=False)

    def validate(self, attrs):
        if attrs['metric_id'] == 'lens' and not attrs.get('q'):
            raise serializers.ValidationError({'q': 'Lens datasets need a modulus'})
        rows = attrs['point_rows']
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise serializers.ValidationError({'points': 'All point rows must have the same length'})
        if attrs['metric_id'] != 'euclidean' and widths and widths.pop() % 2:
            raise serializers.ValidationError({'points': 'Complex points need (re, im) pairs'})
        return attrs

    def create(self, validated_data):
        return MetricDataset.from_rows(
            validated_data['point_rows'],
            metric_id=validated_data['metric_id'],
            seed=validated_data.get('seed'),
            q=validated_data.get('q'),
            metadata=validated_data.get('metadata'),
        )


def save_dataset(dataset: MetricDataset, path):
    return write_json(path, MetricDatasetSerializer(dataset).data)


def load_dataset(path) -> MetricDataset:
    serializer = MetricDatasetSerializer(data=read_json(path))
    serializer.is_valid(raise_exception=True)
    return serializer.save()
