"""
Exact, greedy and matching-based K_{s,s}-tiling.

Searches run on bitmask neighbourhoods: a state is the pair of masks of
still-uncovered U- and V-vertices.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Set, Tuple

import networkx as nx
from networkx.algorithms import bipartite

from tiling.exceptions import InvalidParameterError
from tiling.utils.bigraph import BalancedBigraph, KssCopy, Tiling, bits, popcount
from .config import get_search_config

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    TILED = 'tiled'
    ABSENT = 'absent'
    UNKNOWN = 'unknown'


@dataclass
class TileResult:
    verdict: Verdict
    tiling: Optional[Tiling] = None
    nodes: int = 0

    @property
    def tiled(self) -> bool:
        return self.verdict is Verdict.TILED


@dataclass
class GreedyResult:
    tiling: Tiling
    remainder_u: Tuple[int, ...] = field(default_factory=tuple)
    remainder_v: Tuple[int, ...] = field(default_factory=tuple)

    @property
    def complete(self) -> bool:
        return not self.remainder_u and not self.remainder_v


def hall_tile(G: BalancedBigraph) -> Optional[Tiling]:
    """
    Perfect matching of G as a K_{1,1}-tiling, or None if there is none.

    Uses networkx's Hopcroft-Karp so it stays independent of exact_tile.
    """
    if G.n == 0:
        return Tiling(1, ())
    B = nx.Graph()
    top = [('U', u) for u in range(G.n)]
    B.add_nodes_from(top, bipartite=0)
    B.add_nodes_from((('V', v) for v in range(G.n)), bipartite=1)
    B.add_edges_from((('U', u), ('V', v)) for u, v in G.edges())
    matching = bipartite.hopcroft_karp_matching(B, top_nodes=top)
    pairs = [(u, matching[('U', u)][1]) for u in range(G.n) if ('U', u) in matching]
    if len(pairs) < G.n:
        return None
    return Tiling(1, tuple(KssCopy((u,), (v,)) for u, v in pairs))


def _copies_through(u: int, s: int, masks_u, masks_v, free_u: int, free_v: int) -> Iterator[Tuple[int, int]]:
    """
    Yield (U-mask, V-mask) of every K_{s,s} on free vertices containing u.

    V-sides come in lexicographic order; for each, U-partners are the
    (s-1)-subsets of the common neighbourhood, also lexicographic.
    """
    candidates = list(bits(masks_u[u] & free_v))
    u_bit = 1 << u

    def choose_v(start: int, picked: int, depth: int, common: int) -> Iterator[Tuple[int, int]]:
        if depth == s:
            others = list(bits(common & ~u_bit))
            for group in combinations(others, s - 1):
                mask = u_bit
                for w in group:
                    mask |= 1 << w
                yield mask, picked
            return
        for i in range(start, len(candidates) - (s - depth) + 1):
            v = candidates[i]
            narrowed = common & masks_v[v]
            if popcount(narrowed) < s:
                continue
            yield from choose_v(i + 1, picked | (1 << v), depth + 1, narrowed)

    yield from choose_v(0, 0, 0, free_u)


def _residual_ok(s: int, masks_u, masks_v, free_u: int, free_v: int) -> Tuple[bool, Optional[int]]:
    """Degree pruning; also returns the U-vertex of minimum residual degree."""
    best, best_degree = None, None
    for u in bits(free_u):
        degree = popcount(masks_u[u] & free_v)
        if degree < s:
            return False, None
        if best_degree is None or degree < best_degree:
            best, best_degree = u, degree
    for v in bits(free_v):
        if popcount(masks_v[v] & free_u) < s:
            return False, None
    return True, best


def _has_perfect_matching(masks_u, free_u: int, free_v: int) -> bool:
    match_v: Dict[int, int] = {}

    def augment(u: int, seen: List[int]) -> bool:
        for v in bits(masks_u[u] & free_v & ~seen[0]):
            seen[0] |= 1 << v
            if v not in match_v or augment(match_v[v], seen):
                match_v[v] = u
                return True
        return False

    for u in bits(free_u):
        if not augment(u, [0]):
            return False
    return True


class _BudgetExhausted(Exception):
    pass


def exact_tile(G: BalancedBigraph, s: int, budget: Optional[int] = None) -> TileResult:
    """
    Decide whether G has a K_{s,s}-tiling.

    Args:
        G: the graph
        s: tile size, s >= 1
        budget: maximum copy placements (default from config)

    Returns:
        TileResult with verdict tiled (and the tiling), absent, or unknown
        when the budget ran out
    """
    if s < 1:
        raise InvalidParameterError(f"tile size must be positive, got {s}")
    if G.n % s:
        logger.debug(f"exact_tile: s={s} does not divide n={G.n}")
        return TileResult(Verdict.ABSENT)
    if G.n == 0:
        return TileResult(Verdict.TILED, Tiling(s, ()))
    limit = budget if budget is not None else get_search_config().node_budget

    masks_u, masks_v = G.masks_u, G.masks_v
    failed: Set[Tuple[int, int]] = set()
    placed: List[Tuple[int, int]] = []
    nodes = 0

    def search(free_u: int, free_v: int) -> bool:
        nonlocal nodes
        if free_u == 0:
            return True
        if (free_u, free_v) in failed:
            return False
        ok, u = _residual_ok(s, masks_u, masks_v, free_u, free_v)
        if not ok or not _has_perfect_matching(masks_u, free_u, free_v):
            failed.add((free_u, free_v))
            return False
        for us, vs in _copies_through(u, s, masks_u, masks_v, free_u, free_v):
            nodes += 1
            if nodes > limit:
                raise _BudgetExhausted
            placed.append((us, vs))
            if search(free_u & ~us, free_v & ~vs):
                return True
            placed.pop()
        failed.add((free_u, free_v))
        return False

    full = G.full_mask
    try:
        found = search(full, full)
    except _BudgetExhausted:
        logger.info(f"exact_tile: budget of {limit} nodes exhausted (n={G.n}, s={s})")
        return TileResult(Verdict.UNKNOWN, nodes=nodes)

    if not found:
        logger.debug(f"exact_tile: absent after {nodes} nodes (n={G.n}, s={s})")
        return TileResult(Verdict.ABSENT, nodes=nodes)
    copies = tuple(KssCopy(tuple(bits(us)), tuple(bits(vs))) for us, vs in placed)
    logger.debug(f"exact_tile: tiled after {nodes} nodes (n={G.n}, s={s})")
    return TileResult(Verdict.TILED, Tiling(s, copies), nodes)


def greedy_tile(G: BalancedBigraph, s: int) -> GreedyResult:
    """
    Place copies around the minimum-degree uncovered U-vertex, never undoing one.

    U-vertices with no copy left are set aside; they and the unused
    V-vertices form the remainder.
    """
    if s < 1:
        raise InvalidParameterError(f"tile size must be positive, got {s}")
    masks_u, masks_v = G.masks_u, G.masks_v
    free_u = free_v = G.full_mask
    stuck = 0
    copies: List[KssCopy] = []
    while True:
        candidates = free_u & ~stuck
        if not candidates:
            break
        u = min(bits(candidates), key=lambda x: (popcount(masks_u[x] & free_v), x))
        first = next(_copies_through(u, s, masks_u, masks_v, free_u, free_v), None)
        if first is None:
            stuck |= 1 << u
            continue
        us, vs = first
        copies.append(KssCopy(tuple(bits(us)), tuple(bits(vs))))
        free_u &= ~us
        free_v &= ~vs
    return GreedyResult(Tiling(s, tuple(copies)), tuple(bits(free_u)), tuple(bits(free_v)))
