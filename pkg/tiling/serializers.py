from rest_framework import serializers

from .exceptions import TilingError
from .models import GraphInstance, ScanRow
from .services.config import parse_alpha
from .services.constructions import canonical_family
from .services.runner import MODES
from .utils.textio import BLOCK_NAMES, block_spec_from, parse_block_assignments, read_graph
from .utils.thresholds import ThresholdKind


def _parse_graph(value):
    try:
        return read_graph(value)
    except TilingError as exc:
        raise serializers.ValidationError(f"Graph text does not parse: {exc}")


class GraphInstanceSerializer(serializers.ModelSerializer):
    delta_sum = serializers.IntegerField(read_only=True)

    class Meta:
        model = GraphInstance
        fields = ['id', 'family', 'parameters', 'n', 's', 'delta_u', 'delta_v', 'delta_sum',
                  'identity', 'graph_text', 'created_at']
        read_only_fields = ['created_at']


class ScanRowSerializer(serializers.ModelSerializer):
    class Meta:
        model = ScanRow
        fields = '__all__'
        read_only_fields = ['created_at']


class ConstructionRequestSerializer(serializers.Serializer):
    family = serializers.CharField(max_length=30)
    params = serializers.DictField(required=False, default=dict)
    save = serializers.BooleanField(required=False, default=False)

    def validate_family(self, value):
        try:
            return canonical_family(value)
        except TilingError as exc:
            raise serializers.ValidationError(str(exc))


class TilingRequestSerializer(serializers.Serializer):
    graph = serializers.CharField(help_text="Graph in bigraph text format")
    s = serializers.IntegerField(min_value=1, required=False, help_text="Overrides the header's s")
    mode = serializers.ChoiceField(choices=MODES, default='exact')
    budget = serializers.IntegerField(min_value=1, required=False)
    alpha = serializers.CharField(required=False, help_text="Extremal parameter, e.g. 1/64")

    def validate_graph(self, value):
        return _parse_graph(value)

    def validate_alpha(self, value):
        try:
            return parse_alpha(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise serializers.ValidationError(str(exc))

    def validate(self, data):
        s = data.get('s') or data['graph'].s
        if data['graph'].graph.n % s:
            raise serializers.ValidationError(f"s={s} does not divide n={data['graph'].graph.n}")
        data['s'] = s
        return data


class RefutationRequestSerializer(serializers.Serializer):
    graph = serializers.CharField()
    s = serializers.IntegerField(min_value=1, required=False)
    blocks = serializers.ListField(
        child=serializers.CharField(), required=False,
        help_text="Assignments such as 'U1=0..6'; defaults to the graph's block metadata",
    )

    def validate_graph(self, value):
        return _parse_graph(value)

    def validate(self, data):
        parsed = data['graph']
        if data.get('blocks'):
            try:
                spec = block_spec_from(parse_block_assignments(data['blocks']))
            except TilingError as exc:
                raise serializers.ValidationError({'blocks': str(exc)})
        else:
            spec = parsed.blocks
        if spec is None:
            raise serializers.ValidationError(
                {'blocks': f"No blocks given and the graph carries none; name all of {', '.join(BLOCK_NAMES)}"}
            )
        data['blocks'] = spec
        data['s'] = data.get('s') or parsed.s
        return data


class VerificationRequestSerializer(serializers.Serializer):
    graph = serializers.CharField()
    certificate = serializers.CharField()

    def validate_graph(self, value):
        return _parse_graph(value)


class ThresholdQuerySerializer(serializers.Serializer):
    s = serializers.IntegerField(min_value=1)
    m = serializers.IntegerField(min_value=1)
    kind = serializers.ChoiceField(choices=[kind.value for kind in ThresholdKind], default='main1')
    d = serializers.IntegerField(min_value=0, required=False)
