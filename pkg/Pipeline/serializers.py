from rest_framework import serializers

from Persistence.cohomology import is_prime

# (points, landmarks, boundary seeds) per space
SPACE_DEFAULTS = {
    'circle': (2000, 10, 0),
    'moore': (3000, 70, 10),
    'lens': (3000, 70, 0),
}
# circle noise sigma
DEFAULT_NOISE = 0.05


class PipelineConfigSerializer(serializers.Serializer):
    space = serializers.ChoiceField(choices=list(SPACE_DEFAULTS))
    n_points = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    n_landmarks = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    n_boundary = serializers.IntegerField(min_value=0, required=False, allow_null=True)
    q = serializers.IntegerField(default=3)
    seed = serializers.IntegerField(default=0)
    noise = serializers.FloatField(min_value=0, default=DEFAULT_NOISE)
    epsilon = serializers.FloatField(required=False, allow_null=True, default=None)
    delta = serializers.FloatField(min_value=0, default=1e-5)
    max_dim = serializers.ChoiceField(choices=[2, 3], default=2)
    target_dim = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    tau = serializers.FloatField(required=False, allow_null=True, default=None)
    gamma = serializers.FloatField(required=False, allow_null=True, default=None)
    knn = serializers.IntegerField(min_value=1, default=8)
    isomap_dim = serializers.IntegerField(min_value=1, default=4)
    compare = serializers.BooleanField(default=True)
    out = serializers.CharField()

    def validate_q(self, value):
        if value <= 2 or not is_prime(value):
            raise serializers.ValidationError(f"q must be a prime greater than 2, got {value}")
        return value

    def validate_epsilon(self, value):
        if value is not None and value <= 0:
            raise serializers.ValidationError("epsilon must be positive")
        return value

    def validate(self, attrs):
        points, landmarks, boundary = SPACE_DEFAULTS[attrs['space']]
        if attrs.get('n_points') is None:
            attrs['n_points'] = points
        if attrs.get('n_landmarks') is None:
            attrs['n_landmarks'] = landmarks
        if attrs.get('n_boundary') is None:
            attrs['n_boundary'] = boundary
        if attrs['space'] != 'moore' and attrs['n_boundary']:
            raise serializers.ValidationError({'n_boundary': 'Boundary seeds exist only for the Moore space'})
        if attrs['n_landmarks'] < attrs['n_boundary']:
            raise serializers.ValidationError({'n_landmarks': 'Fewer landmarks than boundary seeds'})
        if attrs['n_landmarks'] > attrs['n_points'] + attrs['n_boundary']:
            raise serializers.ValidationError({'n_landmarks': 'More landmarks than points'})
        if attrs['n_landmarks'] < 2:
            raise serializers.ValidationError({'n_landmarks': 'Lens coordinates need at least two landmarks'})
        if attrs.get('tau') is not None and attrs.get('gamma') is not None:
            raise serializers.ValidationError('Pass at most one of tau and gamma')
        target = attrs.get('target_dim')
        if target is not None and target > attrs['n_landmarks']:
            raise serializers.ValidationError({'target_dim': 'Target dimension exceeds the number of landmarks'})
        return attrs
