from pathlib import Path

import numpy as np
from rest_framework import serializers

from core.ioUtils import read_json, write_json

from .comparison import PerRatioComparison
from .isomap import IsomapConfig, IsomapEmbedding


class IsomapConfigSerializer(serializers.Serializer):
    k_neighbors = serializers.IntegerField(min_value=1)
    target_dim = serializers.IntegerField(min_value=1)

    def create(self, validated_data):
        return IsomapConfig(**validated_data)


class IsomapEmbeddingSerializer(serializers.Serializer):
    """{k_neighbors, target_dim, points: [[x_1..x_d]], eigenvalues}."""
    k_neighbors = serializers.IntegerField(min_value=1)
    target_dim = serializers.IntegerField(min_value=1)
    points = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()), source='point_rows')
    eigenvalues = serializers.ListField(child=serializers.FloatField(min_value=0))

    def validate(self, attrs):
        if any(len(row) != attrs['target_dim'] for row in attrs['point_rows']):
            raise serializers.ValidationError({'points': f"Every point needs {attrs['target_dim']} coordinates"})
        return attrs

    def create(self, validated_data):
        coords = np.asarray(validated_data['point_rows'], dtype=float).reshape(-1, validated_data['target_dim'])
        return IsomapEmbedding(
            coords=coords,
            eigenvalues=np.asarray(validated_data['eigenvalues'], dtype=float),
            config=IsomapConfig(validated_data['k_neighbors'], validated_data['target_dim']),
        )


def save_embedding(embedding: IsomapEmbedding, path):
    return write_json(path, IsomapEmbeddingSerializer(embedding).data)


def load_embedding(path) -> IsomapEmbedding:
    serializer = IsomapEmbeddingSerializer(data=read_json(path))
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def save_comparison(comparison: PerRatioComparison, out_dir):
    """comparison.json and the aligned-text comparison.txt."""
    out_dir = Path(out_dir)
    json_path = write_json(out_dir / 'comparison.json', comparison.as_document())
    text_path = out_dir / 'comparison.txt'
    text_path.write_text(comparison.to_text(), encoding='utf-8')
    return json_path, text_path
