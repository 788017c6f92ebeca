from django.urls import path

from .views import (
    ConstructionView,
    GraphInstanceListView,
    RefutationView,
    ScanRowListView,
    ThresholdView,
    TilingView,
    VerificationView,
)

urlpatterns = [
    path('v1/constructions/', ConstructionView.as_view(), name='construction-create'),
    path('v1/tilings/', TilingView.as_view(), name='tiling-create'),
    path('v1/refutations/', RefutationView.as_view(), name='refutation-create'),
    path('v1/verifications/', VerificationView.as_view(), name='verification-create'),
    path('v1/thresholds/', ThresholdView.as_view(), name='threshold-detail'),
    path('v1/graphs/', GraphInstanceListView.as_view(), name='graph-list'),
    path('v1/scan-rows/', ScanRowListView.as_view(), name='scan-row-list'),
]
