# Graph core, threshold arithmetic and text formats
from .bigraph import (
    BalancedBigraph,
    BlockSpec,
    DegreeProfile,
    KssCopy,
    Side,
    Tiling,
    TilingCheck,
    Vertex,
    common_neighborhood,
    density,
    min_degrees,
    verify_tiling,
)
from .thresholds import ThresholdKind, c_of_s, ceil_sqrt, theorem_report, threshold
from .textio import read_graph, read_tiling, write_graph, write_tiling

__all__ = [
    'BalancedBigraph', 'BlockSpec', 'DegreeProfile', 'KssCopy', 'Side', 'Tiling',
    'TilingCheck', 'Vertex', 'common_neighborhood', 'density', 'min_degrees',
    'verify_tiling', 'ThresholdKind', 'c_of_s', 'ceil_sqrt', 'theorem_report',
    'threshold', 'read_graph', 'read_tiling', 'write_graph', 'write_tiling',
]
