import numpy as np
from rest_framework import serializers

from core.ioUtils import read_json, write_json

from .classifyingMap import LensCloud, LensMapConfig


class LensMapConfigSerializer(serializers.Serializer):
    epsilon = serializers.FloatField()
    q = serializers.IntegerField(min_value=2)
    delta = serializers.FloatField(min_value=0)
    chart_rule = serializers.ChoiceField(choices=['nearest'], default='nearest')

    def create(self, validated_data):
        return LensMapConfig(**validated_data)


class LensCloudSerializer(serializers.Serializer):
    """{q, n, points: [[[re, im] x n] per point], source_index}."""
    q = serializers.IntegerField(min_value=2)
    n = serializers.IntegerField(min_value=1)
    points = serializers.ListField(
        child=serializers.ListField(
            child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2)
        ),
        source='point_pairs',
    )
    source_index = serializers.ListField(child=serializers.IntegerField(min_value=0), source='source_indices')
    coverage = serializers.DictField(required=False)

    def validate(self, attrs):
        if any(len(row) != attrs['n'] for row in attrs['point_pairs']):
            raise serializers.ValidationError({'points': f"Every point needs {attrs['n']} coordinates"})
        if len(attrs['source_indices']) != len(attrs['point_pairs']):
            raise serializers.ValidationError({'source_index': 'One source index per point'})
        return attrs

    def create(self, validated_data):
        pairs = np.asarray(validated_data['point_pairs'], dtype=float).reshape(-1, validated_data['n'], 2)
        return LensCloud(
            reps=pairs[..., 0] + 1j * pairs[..., 1],
            q=validated_data['q'],
            source_indices=validated_data['source_indices'],
            coverage=validated_data.get('coverage', {}),
        )


def save_cloud(cloud: LensCloud, path, config: LensMapConfig = None, **extra):
    payload = dict(LensCloudSerializer(cloud).data)
    if config is not None:
        payload['config'] = LensMapConfigSerializer(config).data
    payload.update(extra)
    return write_json(path, payload)


def load_cloud(path) -> LensCloud:
    serializer = LensCloudSerializer(data=read_json(path))
    serializer.is_valid(raise_exception=True)
    return serializer.save()
