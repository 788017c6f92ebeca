import logging

from django.core.cache import cache
from rest_framework import generics, status
from rest_framework.response import Response
from rest_framework.views import APIView

from .exceptions import TilingError
from .models import GraphInstance, ScanRow
from .serializers import (
    ConstructionRequestSerializer,
    GraphInstanceSerializer,
    RefutationRequestSerializer,
    ScanRowSerializer,
    ThresholdQuerySerializer,
    TilingRequestSerializer,
    VerificationRequestSerializer,
)
from .services.constructions import build
from .services.refuter import refute_by_crossing, verify_refutation
from .services.runner import check_certificate, solve
from .utils.bigraph import min_degrees
from .utils.textio import format_ranges, write_tiling
from .utils.thresholds import threshold

logger = logging.getLogger(__name__)


def error_response(exc):
    logger.warning(f"request rejected: {exc}")
    return Response({'error': str(exc)}, status=status.HTTP_400_BAD_REQUEST)


class ConstructionView(APIView):
    """
    API endpoint for building a gadget or generator instance.

    POST /api/v1/constructions/
    """

    def post(self, request, format=None):
        serializer = ConstructionRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)

        data = serializer.validated_data
        try:
            construction = build(data['family'], **data['params'])
        except TilingError as exc:
            return error_response(exc)

        profile = min_degrees(construction.graph, construction.s)
        response_data = {
            'family': construction.family,
            'n': construction.graph.n,
            's': construction.s,
            'delta_u': profile.delta_u,
            'delta_v': profile.delta_v,
            'delta_sum': profile.delta_sum,
            'delta_gap': profile.delta_gap,
            'identity': construction.identity,
            'notes': construction.notes,
            'blocks': (
                {name: format_ranges(members) for name, members in construction.blocks.as_dict().items()}
                if construction.blocks is not None else None
            ),
            'report': construction.report.as_dict() if construction.report is not None else None,
            'graph': construction.to_text(),
        }
        if data['save']:
            response_data['id'] = GraphInstance.from_construction(construction).id
        return Response(response_data, status=status.HTTP_201_CREATED)


class TilingView(APIView):
    """
    API endpoint for deciding whether a graph has a K_{s,s}-tiling.

    POST /api/v1/tilings/
    """

    def post(self, request, format=None):
        serializer = TilingRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)

        data = serializer.validated_data
        G = data['graph'].graph
        try:
            outcome = solve(G, data['s'], data['mode'], data.get('budget'), data.get('alpha'))
        except TilingError as exc:
            return error_response(exc)

        return Response({
            'verdict': outcome.verdict.value,
            'nodes_explored': outcome.nodes,
            'fallback': outcome.fallback,
            'trace': outcome.trace,
            'tiling': write_tiling(outcome.tiling, G.n) if outcome.tiling is not None else None,
        }, status=status.HTTP_200_OK)


class RefutationView(APIView):
    """
    API endpoint for the block-profile non-tileability certificate.

    POST /api/v1/refutations/
    """

    def post(self, request, format=None):
        serializer = RefutationRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)

        data = serializer.validated_data
        G = data['graph'].graph
        try:
            outcome = refute_by_crossing(G, data['blocks'], data['s'])
        except TilingError as exc:
            return error_response(exc)

        if outcome.refuted:
            check = verify_refutation(G, outcome)
            return Response({
                'refuted': True,
                'verified': check.ok,
                'realizable': [sig.label() for sig in outcome.realizable],
                'system': outcome.system_lines(),
                'certificate': outcome.to_text(),
            }, status=status.HTTP_200_OK)
        return Response({
            'refuted': False,
            'realizable': [sig.label() for sig in outcome.realizable],
            'witness': outcome.describe(),
        }, status=status.HTTP_200_OK)


class VerificationView(APIView):
    """
    API endpoint for re-checking a tiling or refutation certificate.

    POST /api/v1/verifications/
    """

    def post(self, request, format=None):
        serializer = VerificationRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)

        data = serializer.validated_data
        try:
            report = check_certificate(data['graph'].graph, data['certificate'])
        except TilingError as exc:
            return error_response(exc)

        return Response({
            'kind': report.kind,
            'valid': report.ok,
            'violation': report.violation,
        }, status=status.HTTP_200_OK)


class ThresholdView(APIView):
    """
    API endpoint for degree thresholds.

    GET /api/v1/thresholds/?s=3&m=5&kind=main2&d=1
    """

    def get(self, request, format=None):
        serializer = ThresholdQuerySerializer(data=request.query_params)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)

        data = serializer.validated_data
        cache_key = f"threshold_{data['kind']}_{data['s']}_{data['m']}_{data.get('d')}"
        cached = cache.get(cache_key)
        if cached is not None:
            return Response(cached, status=status.HTTP_200_OK)

        try:
            value = threshold(data['s'], data['m'], data['kind'], data.get('d'))
        except TilingError as exc:
            return error_response(exc)

        response_data = {
            's': data['s'],
            'm': data['m'],
            'n': data['s'] * data['m'],
            'kind': data['kind'],
            'd': data.get('d'),
            'threshold': value,
        }
        cache.set(cache_key, response_data)
        return Response(response_data, status=status.HTTP_200_OK)


class GraphInstanceListView(generics.ListAPIView):
    queryset = GraphInstance.objects.all()
    serializer_class = GraphInstanceSerializer


class ScanRowListView(generics.ListAPIView):
    serializer_class = ScanRowSerializer

    def get_queryset(self):
        queryset = ScanRow.objects.all()
        label = self.request.query_params.get('label')
        if label:
            queryset = queryset.filter(label=label)
        return queryset
