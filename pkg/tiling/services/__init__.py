# Search and construction services
from .config import get_search_config, reset_search_config
from .constructions import build, p_graph, sidon_set, sqrt_gadget, unbalanced_gadget, zhao_gadget
from .pipeline import extremal_tile
from .refuter import refute_by_crossing, verify_refutation
from .stars import bidirectional_star_systems, split_kss, star_bounds, star_packing
from .tiler import Verdict, exact_tile, greedy_tile, hall_tile

__all__ = [
    'get_search_config', 'reset_search_config', 'build', 'p_graph', 'sidon_set',
    'sqrt_gadget', 'unbalanced_gadget', 'zhao_gadget', 'extremal_tile',
    'refute_by_crossing', 'verify_refutation', 'bidirectional_star_systems',
    'split_kss', 'star_bounds', 'star_packing', 'Verdict', 'exact_tile',
    'greedy_tile', 'hall_tile',
]
