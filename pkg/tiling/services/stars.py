"""
Star packings between two vertex sets on opposite sides.

An h-star has one centre and h leaves on the other side. The balancer of
the extremal pipeline moves vertices between blocks through such stars.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Tuple

import networkx as nx

from tiling.exceptions import InvalidParameterError
from tiling.utils.bigraph import BalancedBigraph, KssCopy, Side, bits, mask_of, popcount
from .config import get_search_config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Star:
    center: int
    leaves: Tuple[int, ...]


@dataclass(frozen=True)
class StarPacking:
    center_side: Side
    h: int
    stars: Tuple[Star, ...] = field(default_factory=tuple)
    shortfall: bool = False
    exact: bool = False

    def __len__(self):
        return len(self.stars)

    @property
    def direction(self) -> Tuple[Side, Side]:
        return self.center_side, self.center_side.other

    def centers(self) -> frozenset:
        return frozenset(star.center for star in self.stars)

    def leaves(self) -> frozenset:
        return frozenset(leaf for star in self.stars for leaf in star.leaves)

    def take(self, count: int) -> 'StarPacking':
        return StarPacking(self.center_side, self.h, self.stars[:count], len(self.stars) < count, self.exact)


def _rows(G: BalancedBigraph, centers: Iterable[int], leaves: Iterable[int], side: Side) -> Dict[int, int]:
    leaf_mask = mask_of(leaves)
    masks = G.masks(side)
    return {c: masks[c] & leaf_mask for c in sorted(set(centers))}


def _greedy(rows: Dict[int, int], h: int, needed: Optional[int]) -> List[Star]:
    available = 0
    for row in rows.values():
        available |= row
    unused = dict(rows)
    stars: List[Star] = []
    while needed is None or len(stars) < needed:
        eligible = {c: row & available for c, row in unused.items() if popcount(row & available) >= h}
        if not eligible:
            break
        center = min(eligible, key=lambda c: (popcount(eligible[c]), c))
        # leaves wanted by the fewest other eligible centres go first
        demand = {
            leaf: sum(1 for c, row in eligible.items() if c != center and row >> leaf & 1)
            for leaf in bits(eligible[center])
        }
        chosen = sorted(demand, key=lambda leaf: (demand[leaf], leaf))[:h]
        stars.append(Star(center, tuple(sorted(chosen))))
        available &= ~mask_of(chosen)
        del unused[center]
    return stars


def _flow_bound(rows: Dict[int, int], h: int) -> int:
    """⌊max flow / h⌋ with centre capacity h and leaf capacity 1."""
    F = nx.DiGraph()
    for c, row in rows.items():
        F.add_edge('source', ('c', c), capacity=h)
        for leaf in bits(row):
            F.add_edge(('c', c), ('l', leaf), capacity=1)
            F.add_edge(('l', leaf), 'sink', capacity=1)
    if 'sink' not in F:
        return 0
    value, _ = nx.maximum_flow(F, 'source', 'sink')
    return value // h


def _exact(rows: Dict[int, int], h: int, target: int, start: List[Star]) -> List[Star]:
    """Branch and bound for a maximum packing, stopping early at ``target``."""
    centers = [c for c, row in rows.items() if popcount(row) >= h]
    best = list(start)
    seen: Dict[Tuple[int, int], int] = {}
    chosen: List[Star] = []

    def search(i: int, used: int) -> bool:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
            if len(best) >= target:
                return True
        if i == len(centers):
            return False
        remaining_leaves = 0
        for c in centers[i:]:
            remaining_leaves |= rows[c]
        bound = len(chosen) + min(len(centers) - i, popcount(remaining_leaves & ~used) // h)
        if bound <= len(best):
            return False
        key = (i, used)
        if seen.get(key, -1) >= len(chosen):
            return False
        seen[key] = len(chosen)
        center = centers[i]
        for group in combinations(list(bits(rows[center] & ~used)), h):
            chosen.append(Star(center, group))
            if search(i + 1, used | mask_of(group)):
                return True
            chosen.pop()
        return search(i + 1, used)

    search(0, 0)
    return best


def maximum_star_packing(G: BalancedBigraph, centers: Iterable[int], leaves: Iterable[int], h: int,
                         center_side: Side = Side.U) -> StarPacking:
    """A packing of maximum size, by exhaustive search bounded by a flow argument."""
    if h < 1:
        raise InvalidParameterError(f"star size must be positive, got {h}")
    rows = _rows(G, centers, leaves, center_side)
    bound = _flow_bound(rows, h)
    greedy = _greedy(rows, h, None)
    if len(greedy) >= bound:
        return StarPacking(center_side, h, tuple(greedy), exact=True)
    stars = _exact(rows, h, bound, greedy)
    return StarPacking(center_side, h, tuple(stars), exact=True)


def star_packing(G: BalancedBigraph, centers: Iterable[int], leaves: Iterable[int], h: int, needed: int,
                 center_side: Side = Side.U, exact_limit: Optional[int] = None) -> StarPacking:
    """
    Vertex-disjoint h-stars with centres in ``centers`` and leaves in ``leaves``.

    Greedy first; if that falls short of ``needed`` and the leaf pool is
    small enough, an exact maximum is computed. ``shortfall`` is set when
    the result is still below ``needed``.
    """
    if h < 1:
        raise InvalidParameterError(f"star size must be positive, got {h}")
    centers, leaves = list(centers), list(leaves)
    rows = _rows(G, centers, leaves, center_side)
    greedy = _greedy(rows, h, needed)
    if len(greedy) >= needed:
        return StarPacking(center_side, h, tuple(greedy[:needed]))
    limit = exact_limit if exact_limit is not None else get_search_config().star_exact_limit
    if len(leaves) > limit:
        logger.debug(f"star_packing: greedy found {len(greedy)}/{needed}, pool of {len(leaves)} too large for exact search")
        return StarPacking(center_side, h, tuple(greedy), shortfall=True)
    best = maximum_star_packing(G, centers, leaves, h, center_side)
    if len(best) >= needed:
        return StarPacking(center_side, h, best.stars[:needed], exact=True)
    return StarPacking(center_side, h, best.stars, shortfall=True, exact=True)


@dataclass(frozen=True)
class StarBounds:
    f: Fraction
    g: Fraction
    min_degree: int
    max_degree: int


def star_bounds(G: BalancedBigraph, A: Iterable[int], B: Iterable[int], h: int, a_side: Side = Side.U) -> StarBounds:
    """
    Counting lower bounds for disjoint h-stars between A and B.

    With δ = δ(A, B) and Δ = Δ(B, A):
    f = (δ−h+1)|A| / (hΔ+δ−h+1) stars from A to B, and
    g = (δ|A|−(h−1)|B|) / (Δ+hδ−h+1) stars from B to A.
    A bound with a nonpositive numerator or denominator is reported as 0.
    """
    A, B = sorted(set(A)), sorted(set(B))
    if not A or not B:
        return StarBounds(Fraction(0), Fraction(0), 0, 0)
    a_masks, b_masks = G.masks(a_side), G.masks(a_side.other)
    a_mask, b_mask = mask_of(A), mask_of(B)
    delta = min(popcount(a_masks[x] & b_mask) for x in A)
    Delta = max(popcount(b_masks[y] & a_mask) for y in B)

    def ratio(numerator: int, denominator: int) -> Fraction:
        if numerator <= 0 or denominator <= 0:
            return Fraction(0)
        return Fraction(numerator, denominator)

    f = ratio((delta - h + 1) * len(A), h * Delta + delta - h + 1)
    g = ratio(delta * len(A) - (h - 1) * len(B), Delta + h * delta - h + 1)
    return StarBounds(f, g, delta, Delta)


def _min_degree(G: BalancedBigraph, X: List[int], Y: List[int], side: Side) -> int:
    if not X:
        return 0
    masks, y_mask = G.masks(side), mask_of(Y)
    return min(popcount(masks[x] & y_mask) for x in X)


class SystemOutcome(str, Enum):
    FOUND = 'found'
    ABSENT = 'absent'
    UNKNOWN = 'unknown'


@dataclass(frozen=True)
class StarSystems:
    """Outcome of a two-way star request; ``UNKNOWN`` means the search stopped before deciding."""
    outcome: SystemOutcome
    from_a: Optional[StarPacking] = None
    from_b: Optional[StarPacking] = None
    reason: str = ''

    def __bool__(self):
        return self.outcome is SystemOutcome.FOUND

    def __iter__(self):
        return iter((self.from_a, self.from_b))


def _joint_exact(G: BalancedBigraph, A: List[int], B: List[int], a: int, b: int, s: int,
                 a_side: Side, node_cap: int) -> StarSystems:
    """Enumerate A-star systems of size a; accept the first whose residue hosts b B-stars."""
    rows = _rows(G, A, B, a_side)
    centers = [c for c, row in rows.items() if popcount(row) >= s]
    chosen: List[Star] = []
    nodes = 0

    def finish(used_b: int) -> Optional[StarPacking]:
        used_centres = {star.center for star in chosen}
        residual_a = [x for x in A if x not in used_centres]
        residual_b = [y for y in B if not used_b >> y & 1]
        packing = maximum_star_packing(G, residual_b, residual_a, s, a_side.other)
        return packing.take(b) if len(packing) >= b else None

    def search(i: int, used_b: int) -> Optional[StarPacking]:
        nonlocal nodes
        nodes += 1
        if nodes > node_cap:
            raise TimeoutError
        if len(chosen) == a:
            return finish(used_b)
        if len(centers) - i < a - len(chosen):
            return None
        center = centers[i]
        for group in combinations(list(bits(rows[center] & ~used_b)), s):
            chosen.append(Star(center, group))
            found = search(i + 1, used_b | mask_of(group))
            if found is not None:
                return found
            chosen.pop()
        return search(i + 1, used_b)

    try:
        from_b = search(0, 0)
    except TimeoutError:
        logger.info(f"bidirectional_star_systems: exact search stopped after {node_cap} nodes")
        return StarSystems(SystemOutcome.UNKNOWN, reason=f"exact search stopped after {node_cap} nodes")
    if from_b is None:
        return StarSystems(SystemOutcome.ABSENT, reason='exhausted every star system')
    return StarSystems(SystemOutcome.FOUND, StarPacking(a_side, s, tuple(chosen), exact=True), from_b)


def bidirectional_star_systems(G: BalancedBigraph, A: Iterable[int], B: Iterable[int], a: int, b: int, s: int,
                               a_side: Side = Side.U, exact_limit: Optional[int] = None,
                               node_cap: int = 200_000) -> StarSystems:
    """
    ``a`` s-stars from A to B and ``b`` s-stars from B to A, all disjoint.

    The side with the larger minimum degree into the other is packed
    first, the other side on what is left; then the opposite order; then
    an exact search when the sets are small.

    Returns:
        StarSystems: FOUND with both packings, ABSENT when no such systems
        exist, UNKNOWN when the sets are too large for the exact search or
        it ran past ``node_cap``
    """
    if a < 0 or b < 0:
        raise InvalidParameterError(f"star counts must be nonnegative, got a={a} b={b}")
    A, B = sorted(set(A)), sorted(set(B))
    if a == 0 and b == 0:
        return StarSystems(SystemOutcome.FOUND, StarPacking(a_side, s), StarPacking(a_side.other, s))
    # each A-star uses one A-vertex and s B-vertices, and vice versa
    if a + b * s > len(A) or a * s + b > len(B):
        return StarSystems(SystemOutcome.ABSENT, reason='not enough vertices')
    limit = exact_limit if exact_limit is not None else get_search_config().star_exact_limit

    def a_first() -> Optional[Tuple[StarPacking, StarPacking]]:
        from_a = star_packing(G, A, B, s, a, a_side, limit)
        if from_a.shortfall:
            return None
        used = from_a.leaves()
        rest_b = [y for y in B if y not in used]
        rest_a = [x for x in A if x not in from_a.centers()]
        from_b = star_packing(G, rest_b, rest_a, s, b, a_side.other, limit)
        return None if from_b.shortfall else (from_a, from_b)

    def b_first() -> Optional[Tuple[StarPacking, StarPacking]]:
        from_b = star_packing(G, B, A, s, b, a_side.other, limit)
        if from_b.shortfall:
            return None
        used = from_b.leaves()
        rest_a = [x for x in A if x not in used]
        rest_b = [y for y in B if y not in from_b.centers()]
        from_a = star_packing(G, rest_a, rest_b, s, a, a_side, limit)
        return None if from_a.shortfall else (from_a, from_b)

    degree_ab = _min_degree(G, A, B, a_side)
    degree_ba = _min_degree(G, B, A, a_side.other)
    orders = (b_first, a_first) if degree_ba >= degree_ab else (a_first, b_first)
    for attempt in orders:
        found = attempt()
        if found is not None:
            return StarSystems(SystemOutcome.FOUND, *found)
    if len(A) + len(B) > 2 * limit:
        logger.debug(f"bidirectional_star_systems: {len(A)}+{len(B)} vertices exceed the exact limit {limit}")
        return StarSystems(SystemOutcome.UNKNOWN, reason=f"{len(A) + len(B)} vertices exceed the exact limit")
    return _joint_exact(G, A, B, a, b, s, a_side, node_cap)


@dataclass(frozen=True)
class SplitResult:
    copy: Optional[KssCopy]
    hypothesis_holds: bool


def split_kss(G: BalancedBigraph, U0: Iterable[int], V1p: Iterable[int], V2p: Iterable[int], s: int, b: int,
              side: Side = Side.U) -> SplitResult:
    """
    A K_{s,s} with s vertices in U0, b in V1p and s−b in V2p.

    With ``side=Side.V`` the roles of U and V are exchanged: U0 is then a
    V-subset and V1p, V2p are U-subsets; the copy is returned in G's
    orientation either way.

    The result also reports whether δ(V1p,U0)+δ(V2p,U0) >= |U0|+s with
    both V1p and V2p of size at least n/8.
    """
    if not 0 <= b <= s:
        raise InvalidParameterError(f"split needs 0 <= b <= s, got b={b} s={s}")
    if side is Side.V:
        result = split_kss(G.transposed(), U0, V1p, V2p, s, b)
        copy = result.copy.transposed() if result.copy is not None else None
        return SplitResult(copy, result.hypothesis_holds)

    U0, V1p, V2p = sorted(set(U0)), sorted(set(V1p)), sorted(set(V2p))
    masks_u = G.masks_u
    mask_1, mask_2 = mask_of(V1p), mask_of(V2p)
    degree_1 = _min_degree(G, V1p, U0, Side.V) if V1p else 0
    degree_2 = _min_degree(G, V2p, U0, Side.V) if V2p else 0
    hypothesis = (
        bool(V1p) and bool(V2p)
        and degree_1 + degree_2 >= len(U0) + s
        and 8 * len(V1p) >= G.n and 8 * len(V2p) >= G.n
    )

    chosen: List[int] = []

    def search(start: int, common_1: int, common_2: int) -> Optional[KssCopy]:
        if len(chosen) == s:
            vs = list(bits(common_1))[:b] + list(bits(common_2))[:s - b]
            return KssCopy(tuple(chosen), tuple(vs))
        for i in range(start, len(U0) - (s - len(chosen)) + 1):
            u = U0[i]
            next_1, next_2 = common_1 & masks_u[u], common_2 & masks_u[u]
            if popcount(next_1) < b or popcount(next_2) < s - b:
                continue
            chosen.append(u)
            found = search(i + 1, next_1, next_2)
            if found is not None:
                return found
            chosen.pop()
        return None

    copy = search(0, mask_1, mask_2) if s >= 1 else None
    return SplitResult(copy, hypothesis)
