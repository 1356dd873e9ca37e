"""
Scenario serializers.

Every section of a scenario file is validated by one serializer; unknown keys
are rejected so that typos fail early instead of silently falling back to a
default.
"""

from rest_framework import serializers

from apps.hj_solver.stencil import SPEED_POLICIES

HAMILTONIAN_FORMS = ("composite", "tabulated")
PROFILES = ("quadratic", "linear", "power")
INITIAL_KINDS = ("constant", "table", "distance_to_vertex", "bump")
ORIENTATIONS = ("min", "max")


class StrictSerializer(serializers.Serializer):
    """Serializer that rejects keys it does not declare."""

    def to_internal_value(self, data):
        if isinstance(data, dict):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError({key: ["Unknown key."] for key in unknown})
        return super().to_internal_value(data)


class NumberOrPathField(serializers.Field):
    """A number, or the path of a ``node_id,value`` CSV table."""

    def to_internal_value(self, data):
        if isinstance(data, (int, float)):
            return float(data)
        text = str(data).strip()
        if not text:
            raise serializers.ValidationError("Expected a number or a CSV path.")
        try:
            return float(text)
        except ValueError:
            return text

    def to_representation(self, value):
        return value


def positive(value):
    if not value > 0:
        raise serializers.ValidationError("Must be positive.")
    return value


class EdgeSerializer(StrictSerializer):
    u = serializers.CharField()
    v = serializers.CharField()
    length = serializers.FloatField(validators=[positive])


class GraphSerializer(StrictSerializer):
    vertices = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    edges = EdgeSerializer(many=True, allow_empty=False)

    def validate(self, attrs):
        vertices = attrs["vertices"]
        if len(set(vertices)) != len(vertices):
            raise serializers.ValidationError({"vertices": ["Duplicate vertex ids."]})
        known = set(vertices)
        for index, edge in enumerate(attrs["edges"]):
            for end in ("u", "v"):
                if edge[end] not in known:
                    raise serializers.ValidationError(
                        {"edges": {index: {end: [f"Unknown vertex {edge[end]!r}."]}}}
                    )
        return attrs


class HamiltonianSerializer(StrictSerializer):
    form = serializers.ChoiceField(choices=HAMILTONIAN_FORMS)
    h = serializers.ChoiceField(choices=PROFILES, required=False)
    a = serializers.FloatField(required=False)
    sigma = NumberOrPathField(required=False, default=1.0)
    f = NumberOrPathField(required=False, default=0.0)
    table = serializers.CharField(required=False)
    p_max = serializers.FloatField(required=False, validators=[positive])
    n_p = serializers.IntegerField(required=False, min_value=2)

    def validate_sigma(self, value):
        if isinstance(value, float) and not value > 0:
            raise serializers.ValidationError("Must be positive.")
        return value

    def validate(self, attrs):
        if attrs["form"] == "composite":
            if "h" not in attrs:
                raise serializers.ValidationError({"h": ["Required for the composite form."]})
            if attrs["h"] == "power" and not attrs.get("a", 0.0) > 1.0:
                raise serializers.ValidationError({"a": ["The power exponent must exceed 1."]})
        elif "table" not in attrs:
            raise serializers.ValidationError({"table": ["Required for the tabulated form."]})
        return attrs


class InitialSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=INITIAL_KINDS)
    value = serializers.FloatField(required=False)
    path = serializers.CharField(required=False)
    vertex = serializers.CharField(required=False)
    scale = serializers.FloatField(required=False, default=1.0)
    radius = serializers.FloatField(required=False, validators=[positive])
    height = serializers.FloatField(required=False, default=1.0)

    REQUIRED = {
        "constant": ("value",),
        "table": ("path",),
        "distance_to_vertex": ("vertex",),
        "bump": ("vertex", "radius"),
    }

    def validate(self, attrs):
        for key in self.REQUIRED[attrs["kind"]]:
            if key not in attrs:
                raise serializers.ValidationError({key: [f"Required for kind {attrs['kind']}."]})
        return attrs


class SolverSerializer(StrictSerializer):
    T = serializers.FloatField(validators=[positive])
    dt = serializers.FloatField(validators=[positive])
    dx = serializers.FloatField(validators=[positive])
    v_grid = serializers.CharField(required=False, default="geometric")
    n_speeds = serializers.IntegerField(required=False, min_value=2)
    orientation = serializers.ChoiceField(choices=ORIENTATIONS, required=False, default="min")

    def validate_v_grid(self, value):
        if value in SPEED_POLICIES:
            return value
        try:
            speeds = [float(token) for token in value.split(",")]
        except ValueError:
            raise serializers.ValidationError(
                "Must be geometric, uniform or a comma-separated list of speeds."
            ) from None
        if any(speed < 0 for speed in speeds):
            raise serializers.ValidationError("Speeds must be nonnegative.")
        if 0.0 not in speeds:
            raise serializers.ValidationError("The speed list must contain 0.")
        return speeds


class VerificationSerializer(StrictSerializer):
    seed = serializers.IntegerField(required=False, default=0, min_value=0)
    curves = serializers.IntegerField(required=False, default=200, min_value=1)
    triples = serializers.IntegerField(required=False, default=20, min_value=1)
    probes = serializers.IntegerField(required=False, default=20, min_value=0)
    v_cap = serializers.FloatField(required=False, min_value=0.0)
    tolerance_factor = serializers.FloatField(required=False, default=1.0, validators=[positive])
    corrupt = serializers.BooleanField(required=False, default=False)
    comparison_shift = serializers.FloatField(required=False, default=0.5, min_value=0.0)


class TransformSerializer(StrictSerializer):
    v_max = serializers.FloatField(required=False, default=5.0, validators=[positive])
    n_v = serializers.IntegerField(required=False, default=50, min_value=1)


class RefinementSerializer(StrictSerializer):
    levels = serializers.IntegerField(required=False, default=3, min_value=2)


class OutputSerializer(StrictSerializer):
    dir = serializers.CharField(required=False, default="out")


class ProbeSerializer(StrictSerializer):
    edge = serializers.IntegerField(min_value=0)
    offset = serializers.FloatField(min_value=0.0)
    t = serializers.FloatField(min_value=0.0)


class ScenarioSerializer(StrictSerializer):
    graph = GraphSerializer()
    hamiltonian = HamiltonianSerializer()
    initial = InitialSerializer()
    solver = SolverSerializer()
    verification = VerificationSerializer()
    transform = TransformSerializer()
    refinement = RefinementSerializer()
    output = OutputSerializer()
    probes = ProbeSerializer(many=True, allow_empty=True)

    def validate(self, attrs):
        if attrs["solver"]["orientation"] == "max" and attrs["hamiltonian"]["form"] == "tabulated":
            raise serializers.ValidationError(
                {"solver": {"orientation": ["The max orientation needs the composite form."]}}
            )
        return attrs
