import numpy as np
from rest_framework import serializers

from core.ioUtils import read_json, write_json
from LensMap.serializers import LensCloudSerializer

from .lensPca import PVAR_CONVENTION, LpcaResult


class LpcaResultSerializer(serializers.Serializer):
    """{q, n, components: [[[re, im] x n] per component], var, pvar, reported_pvar}."""
    q = serializers.IntegerField(min_value=2)
    n = serializers.IntegerField(min_value=2)
    components = serializers.ListField(
        child=serializers.ListField(
            child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2)
        ),
        source='component_pairs',
    )
    var = serializers.ListField(child=serializers.FloatField(min_value=0))
    pvar = serializers.ListField(child=serializers.FloatField())
    reported_pvar = serializers.ListField(child=serializers.FloatField(), read_only=True)
    zero_vector_count = serializers.IntegerField(min_value=0, default=0)
    pvar_convention = serializers.SerializerMethodField()

    def get_pvar_convention(self, obj):
        return PVAR_CONVENTION

    def validate(self, attrs):
        n = attrs['n']
        if len(attrs['component_pairs']) != n or any(len(c) != n for c in attrs['component_pairs']):
            raise serializers.ValidationError({'components': f"Expected {n} components with {n} entries each"})
        if len(attrs['var']) != n or len(attrs['pvar']) != n:
            raise serializers.ValidationError({'pvar': f"var and pvar need {n} entries"})
        return attrs

    def create(self, validated_data):
        pairs = np.asarray(validated_data['component_pairs'], dtype=float)
        columns = pairs[..., 0] + 1j * pairs[..., 1]
        return LpcaResult(
            components=columns.T,
            q=validated_data['q'],
            var=validated_data['var'],
            pvar=validated_data['pvar'],
            zero_vector_count=validated_data['zero_vector_count'],
        )


def save_lpca(result: LpcaResult, path, coord_dims=(2,), **extra):
    """Writes the result with P_k for every k in coord_dims under `coords`."""
    payload = dict(LpcaResultSerializer(result).data)
    payload['coords'] = {
        str(k): LensCloudSerializer(result.coordinates(k)).data for k in sorted(set(coord_dims))
    }
    payload.update(extra)
    return write_json(path, payload)


def load_lpca(path) -> LpcaResult:
    payload = read_json(path)
    serializer = LpcaResultSerializer(data=payload)
    serializer.is_valid(raise_exception=True)
    result = serializer.save()
    for k, doc in payload.get('coords', {}).items():
        coords = LensCloudSerializer(data=doc)
        coords.is_valid(raise_exception=True)
        result.coords[int(k)] = coords.save()
    return result
