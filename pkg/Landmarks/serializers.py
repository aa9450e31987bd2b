from rest_framework import serializers

from core.ioUtils import read_json, write_json

from .selection import LandmarkSet


class LandmarkSetSerializer(serializers.Serializer):
    indices = serializers.ListField(child=serializers.IntegerField(min_value=0), min_length=1)
    cover_radius = serializers.FloatField(min_value=0)

    def validate_indices(self, value):
        if len(set(value)) != len(value):
            raise serializers.ValidationError('Landmark indices must be distinct')
        return value

    def create(self, validated_data):
        return LandmarkSet(**validated_data)


def save_landmarks(landmarks: LandmarkSet, path):
    return write_json(path, LandmarkSetSerializer(landmarks).data)


def load_landmarks(path) -> LandmarkSet:
    serializer = LandmarkSetSerializer(data=read_json(path))
    serializer.is_valid(raise_exception=True)
    return serializer.save()
