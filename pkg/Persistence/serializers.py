import numpy as np
from rest_framework import serializers

from core.ioUtils import read_json, write_json

from .cohomology import Cocycle, PersistenceDiagram, PersistenceResult


class DiagramSerializer(serializers.Serializer):
    """{dim, pairs: [[birth, death | null]]}; null marks an essential class."""
    dim = serializers.IntegerField(min_value=0)
    pairs = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(allow_null=True), min_length=2, max_length=2)
    )

    def validate_pairs(self, value):
        for birth, death in value:
            if birth is None:
                raise serializers.ValidationError('Births must be finite')
            if death is not None and death < birth:
                raise serializers.ValidationError(f'Pair ({birth}, {death}) has birth after death')
        return value

    def create(self, validated_data):
        pairs = [(b, np.inf if d is None else d) for b, d in validated_data['pairs']]
        return PersistenceDiagram(dim=validated_data['dim'], pairs=pairs)


class CocycleSerializer(serializers.Serializer):
    """{q, edges: [[j, k, value]], valid_below}; j < k are landmark positions."""
    q = serializers.IntegerField(min_value=2)
    edges = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(), min_length=3, max_length=3),
        source='edge_rows',
    )
    valid_below = serializers.FloatField(allow_null=True)
    birth = serializers.FloatField(required=False, allow_null=True)
    death = serializers.FloatField(required=False, allow_null=True)

    def validate(self, attrs):
        for j, k, _ in attrs['edge_rows']:
            if not 0 <= j < k:
                raise serializers.ValidationError({'edges': f'Edge ({j}, {k}) is not ordered j < k'})
        return attrs

    def create(self, validated_data):
        q = validated_data['q']
        valid_below = validated_data['valid_below']
        death = validated_data.get('death')
        return Cocycle(
            q=q,
            values={(j, k): v % q for j, k, v in validated_data['edge_rows']},
            valid_below=np.inf if valid_below is None else valid_below,
            birth=validated_data.get('birth'),
            death=np.inf if death is None and valid_below is None else death,
        )


def save_persistence(result: PersistenceResult, diagrams_path, cocycles_path):
    write_json(diagrams_path, {
        'q': result.q,
        'diagrams': [DiagramSerializer(dgm).data for _, dgm in sorted(result.diagrams.items())],
    })
    write_json(cocycles_path, {
        'q': result.q,
        'cocycles': [CocycleSerializer(c).data for c in result.cocycles],
    })


def load_diagrams(path):
    payload = read_json(path)
    serializer = DiagramSerializer(data=payload['diagrams'], many=True)
    serializer.is_valid(raise_exception=True)
    return {dgm.dim: dgm for dgm in serializer.save()}


def load_cocycles(path):
    payload = read_json(path)
    serializer = CocycleSerializer(data=payload['cocycles'], many=True)
    serializer.is_valid(raise_exception=True)
    return serializer.save()
