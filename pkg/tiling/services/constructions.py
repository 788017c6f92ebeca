"""
Generators for the circulant P-graphs and the extremal gadget families.

Every builder lays its blocks out contiguously (U1 = 0..|U1|-1, U2 after it,
same for V) and re-checks the degree identity it is built to attain before
returning. Random families take an explicit seed and are reproducible.
"""

import logging
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Set, Tuple

from sympy import isprime, nextprime, primefactors
from sympy.ntheory import is_quad_residue

from tiling.exceptions import (
    CapacityError,
    FloorViolationError,
    GadgetError,
    InfeasibleDeletionError,
    InvalidParameterError,
    NoSidonSetError,
    RetryExhaustedError,
    SelfCheckError,
)
from tiling.utils.bigraph import BalancedBigraph, BlockSpec, bits, min_degrees, popcount
from tiling.utils.textio import write_graph
from tiling.utils.thresholds import c_of_s, ceil_sqrt, square_split
from .config import get_search_config

logger = logging.getLogger(__name__)


# primes tried by the field construction, from the smallest usable one up
FIELD_PRIMES = 4
DELETION_NODE_LIMIT = 50_000


class _StepLimit(Exception):
    pass


def _is_sidon(values: Sequence[int], m: int) -> bool:
    seen: Set[int] = set()
    for a in values:
        for b in values:
            if a == b:
                continue
            d = (a - b) % m
            if d == 0 or d in seen:
                return False
            seen.add(d)
    return True


def _search_sidon(m: int, p: int, limit: int) -> Optional[FrozenSet[int]]:
    """Smallest-first backtracking from 0; raises _StepLimit after ``limit`` candidate tests."""
    if p == 0:
        return frozenset()
    # p(p-1) ordered differences must be distinct nonzero residues
    if p * (p - 1) > m - 1:
        return None

    chosen = [0]
    used: Set[int] = set()
    steps = 0

    def extend(start: int) -> bool:
        nonlocal steps
        if len(chosen) == p:
            return True
        for candidate in range(start, m - (p - len(chosen)) + 1):
            steps += 1
            if steps > limit:
                raise _StepLimit
            fresh = []
            for a in chosen:
                forward, backward = (candidate - a) % m, (a - candidate) % m
                if forward == backward or forward in used or backward in used or forward in fresh or backward in fresh:
                    break
                fresh.extend((forward, backward))
            else:
                chosen.append(candidate)
                used.update(fresh)
                if extend(candidate + 1):
                    return True
                chosen.pop()
                used.difference_update(fresh)
        return False

    return frozenset(chosen) if extend(1) else None


class _QuadraticField:
    """GF(q²) as pairs (a, b) = a + b·x with x² = r for a non-residue r mod the odd prime q."""

    def __init__(self, q: int):
        self.q = q
        self.r = next(c for c in range(2, q) if not is_quad_residue(c, q))

    def mul(self, x: Tuple[int, int], y: Tuple[int, int]) -> Tuple[int, int]:
        q, r = self.q, self.r
        return (x[0] * y[0] + r * x[1] * y[1]) % q, (x[0] * y[1] + x[1] * y[0]) % q

    def power(self, x: Tuple[int, int], e: int) -> Tuple[int, int]:
        result = (1, 0)
        while e:
            if e & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            e >>= 1
        return result

    def generator(self) -> Tuple[int, int]:
        order = self.q * self.q - 1
        factors = primefactors(order)
        for b in range(1, self.q):
            for a in range(self.q):
                if all(self.power((a, b), order // f) != (1, 0) for f in factors):
                    return a, b
        raise SelfCheckError(f"GF({self.q}²) has no generator")


@lru_cache(maxsize=None)
def field_sidon_set(q: int) -> Tuple[int, ...]:
    """
    q residues mod q²−1 with pairwise distinct differences, none of them a multiple of q+1.

    These are the exponents a with θ^a − θ in GF(q), θ a generator of
    GF(q²)*. Translates of any subset by multiples of q+1 are therefore
    pairwise disjoint as long as they do not wrap around the modulus.

    Raises:
        InvalidParameterError: q is not an odd prime
    """
    if q < 3 or not isprime(q):
        raise InvalidParameterError(f"field construction needs an odd prime, got {q}")
    field = _QuadraticField(q)
    theta = field.generator()
    order = q * q - 1
    exponents = []
    power = (1, 0)
    for a in range(order):
        if power[1] == theta[1]:
            exponents.append(a)
        power = field.mul(power, theta)
    if len(exponents) != q or not _is_sidon(exponents, order):
        raise SelfCheckError(f"GF({q}²) exponents {exponents} are not a Sidon set of size {q}")
    return tuple(exponents)


def _field_windows(m: int, p: int) -> Iterator[Tuple[int, ...]]:
    """Size-p Sidon sets mod m cut from field_sidon_set, narrowest first for each prime."""
    if p < 1:
        return
    q = int(nextprime(max(p, 3) - 1))
    for _ in range(FIELD_PRIMES):
        order = q * q - 1
        if order > m:
            return
        base = field_sidon_set(q)
        windows = set()
        for start in range(q):
            origin = base[start]
            windows.add(tuple(sorted((base[(start + i) % q] - origin) % order for i in range(p))))
        for window in sorted(windows, key=lambda w: (w[-1], w)):
            if _is_sidon(window, m):
                yield window
        q = int(nextprime(q))


def sidon_set(m: int, p: int, step_limit: Optional[int] = None) -> Optional[FrozenSet[int]]:
    """
    Find p residues mod m whose pairwise differences are all distinct.

    The search fixes 0 as the first element and extends with the smallest
    admissible residue, backtracking on dead ends. If it runs out of steps,
    windows of the field construction are tried instead.

    Args:
        m: modulus, m >= 1
        p: set size, p >= 0
        step_limit: candidate tests before the search gives up (default from config)

    Returns:
        the set, containing 0, or None when no such set is found
    """
    if m < 1 or p < 0:
        raise InvalidParameterError(f"sidon_set needs m >= 1 and p >= 0, got m={m} p={p}")
    limit = step_limit if step_limit is not None else get_search_config().sidon_step_limit
    try:
        return _search_sidon(m, p, limit)
    except _StepLimit:
        logger.warning(f"sidon_set({m}, {p}) search gave up after {limit} steps")
    for window in _field_windows(m, p):
        logger.info(f"sidon_set({m}, {p}): using field window {list(window)}")
        return frozenset(window)
    return None


def disjoint_shifts(m: int, connection: Iterable[int], count: int) -> Optional[Tuple[int, ...]]:
    """
    ``count`` residues t whose translates t + connection are pairwise disjoint mod m.

    Only progressions 0, g, 2g, ... are tried, for g = 1, 2, ..., m−1.
    """
    connection = frozenset(connection)
    if count <= 0:
        return ()
    if count > m:
        return None
    if not connection:
        return tuple(range(count))
    differences = {(a - b) % m for a in connection for b in connection}
    for g in range(1, m):
        if all(i * g % m not in differences for i in range(1, count)):
            return tuple(sorted(i * g % m for i in range(count)))
    return None


@dataclass(frozen=True)
class CrossBlock:
    """
    A bipartite block between a source and a target vertex set.

    ``adjacency[i]`` holds the target indices adjacent to source i.
    """

    adjacency: Tuple[FrozenSet[int], ...]
    targets: int

    @classmethod
    def circulant(cls, m: int, connection: FrozenSet[int]) -> 'CrossBlock':
        return cls(tuple(frozenset((i + d) % m for d in connection) for i in range(m)), m)

    @classmethod
    def empty(cls, sources: int, targets: int) -> 'CrossBlock':
        return cls(tuple(frozenset() for _ in range(sources)), targets)

    @property
    def sources(self) -> int:
        return len(self.adjacency)

    def target_degrees(self) -> List[int]:
        degrees = [0] * self.targets
        for row in self.adjacency:
            for t in row:
                degrees[t] += 1
        return degrees

    def min_source_degree(self) -> Optional[int]:
        return min((len(row) for row in self.adjacency), default=None)

    def min_target_degree(self) -> Optional[int]:
        return min(self.target_degrees(), default=None)

    def transposed(self) -> 'CrossBlock':
        rows: List[Set[int]] = [set() for _ in range(self.targets)]
        for i, row in enumerate(self.adjacency):
            for t in row:
                rows[t].add(i)
        return CrossBlock(tuple(frozenset(r) for r in rows), self.sources)

    def repeated_pair(self) -> Optional[Tuple[int, int]]:
        """Two targets that two distinct sources both reach, if any."""
        seen: Set[Tuple[int, int]] = set()
        for row in self.adjacency:
            for pair in combinations(sorted(row), 2):
                if pair in seen:
                    return pair
                seen.add(pair)
        return None


def p_graph(m: int, p: int, connection: Optional[FrozenSet[int]] = None) -> BalancedBigraph:
    """
    The bipartite circulant P(m, p): u_i ~ v_{i+d mod m} for d in a Sidon set.

    Raises:
        NoSidonSetError: no Sidon set of size p was found mod m
        SelfCheckError: the result is not p-regular or contains a K_{2,2}
    """
    block = _p_block(m, p, connection)
    _check_p_block(block, p)
    G = BalancedBigraph(m, block.adjacency, block.transposed().adjacency)
    logger.debug(f"P({m}, {p}) built with connection set {sorted(block.adjacency[0]) if m else []}")
    return G


def _p_block(m: int, p: int, connection: Optional[FrozenSet[int]] = None) -> CrossBlock:
    if connection is None:
        connection = sidon_set(m, p)
        if connection is None:
            raise NoSidonSetError(m, p)
    return CrossBlock.circulant(m, frozenset(connection))


def _check_p_block(block: CrossBlock, p: int) -> None:
    if any(len(row) != p for row in block.adjacency) or any(d != p for d in block.target_degrees()):
        raise SelfCheckError(f"P({block.sources}, {p}) is not {p}-regular")
    pair = block.repeated_pair()
    if pair is not None:
        raise SelfCheckError(f"P({block.sources}, {p}) contains a K_{{2,2}} through targets {pair}")


def delete_preserving_min_degree(block: CrossBlock, count: int, floor: int,
                                 prefer: Sequence[int] = ()) -> Tuple[CrossBlock, Tuple[int, ...]]:
    """
    Remove ``count`` sources while keeping every target degree >= floor.

    Each step removes the source whose removal leaves the largest minimum
    target degree, lowest index first on ties. If that order breaks the
    floor, a depth-first search over removal sets decides, trying the
    ``prefer`` sources first.

    Returns:
        (block restricted to the kept sources, original indices of the kept sources)

    Raises:
        InfeasibleDeletionError: count exceeds the number of sources
        FloorViolationError: no removal set keeping the floor was found
    """
    if count < 0 or count > block.sources:
        raise InfeasibleDeletionError(f"cannot delete {count} of {block.sources} vertices")
    if floor < 0:
        raise InvalidParameterError(f"degree floor must be nonnegative, got {floor}")

    degrees = block.target_degrees()
    current = min(degrees, default=None)
    if current is not None and floor > current:
        raise FloorViolationError(floor, current)

    alive, achieved = _greedy_removal(block, count, list(degrees))
    if achieved is None or achieved >= floor:
        kept = tuple(alive)
    else:
        removed = _exact_removal(block, count, floor, degrees, prefer)
        if removed is None:
            raise FloorViolationError(floor, achieved)
        logger.debug(f"delete_preserving_min_degree: greedy reached {achieved} < {floor}; "
                     f"exact search removed {sorted(removed)}")
        kept = tuple(i for i in range(block.sources) if i not in removed)
    return CrossBlock(tuple(block.adjacency[i] for i in kept), block.targets), kept


def _greedy_removal(block: CrossBlock, count: int, degrees: List[int]) -> Tuple[List[int], Optional[int]]:
    alive = list(range(block.sources))
    for _ in range(count):
        global_min = min(degrees, default=math.inf)
        best_index, best_value = None, None
        for position, source in enumerate(alive):
            value = global_min
            for t in block.adjacency[source]:
                value = min(value, degrees[t] - 1)
            if best_value is None or value > best_value:
                best_index, best_value = position, value
        removed = alive.pop(best_index)
        for t in block.adjacency[removed]:
            degrees[t] -= 1
    return alive, min(degrees, default=None)


def _exact_removal(block: CrossBlock, count: int, floor: int, degrees: Sequence[int],
                   prefer: Sequence[int], node_limit: int = DELETION_NODE_LIMIT) -> Optional[FrozenSet[int]]:
    """``count`` sources taking at most degree − floor neighbours from every target, or None."""
    slack = [d - floor for d in degrees]
    first = [i for i in dict.fromkeys(prefer) if 0 <= i < block.sources]
    seen = set(first)
    order = first + [i for i in range(block.sources) if i not in seen]
    chosen: List[int] = []
    nodes = 0

    def search(start: int) -> bool:
        nonlocal nodes
        if len(chosen) == count:
            return True
        for position in range(start, len(order) - (count - len(chosen)) + 1):
            nodes += 1
            if nodes > node_limit:
                raise _StepLimit
            row = block.adjacency[order[position]]
            if any(slack[t] < 1 for t in row):
                continue
            for t in row:
                slack[t] -= 1
            chosen.append(order[position])
            if search(position + 1):
                return True
            chosen.pop()
            for t in row:
                slack[t] += 1
        return False

    try:
        return frozenset(chosen) if search(0) else None
    except _StepLimit:
        logger.info(f"delete_preserving_min_degree: exact search stopped after {node_limit} nodes")
        return None


@dataclass
class GadgetSpec:
    family: str
    params: Dict[str, object]
    block_sizes: Optional[Tuple[int, int, int, int]] = None

    def __post_init__(self):
        if self.block_sizes is not None:
            u1, u2, v1, v2 = self.block_sizes
            if u1 + u2 != v1 + v2:
                raise SelfCheckError(f"block sizes {self.block_sizes} do not balance")


@dataclass
class PropertyReport:
    """Outcome of the desk-scale checks on a sampled random lower-bound graph."""

    s: int
    c: float
    d: int
    a: int
    b: int
    edge_probability: float
    attempts: int
    min_degree_a: int
    min_degree_b: int
    required_degree_a: int
    required_degree_b: int
    kds_witness: Optional[Tuple[int, ...]] = None

    @property
    def degree_ok(self) -> bool:
        return self.min_degree_a >= self.required_degree_a and self.min_degree_b >= self.required_degree_b

    @property
    def kds_free(self) -> bool:
        return self.kds_witness is None

    @property
    def passed(self) -> bool:
        return self.degree_ok and self.kds_free

    @property
    def counting_contradiction(self) -> bool:
        # every copy meeting A uses at most d-1 vertices of A and s of B
        return self.passed and self.s * -(-self.a // (self.d - 1)) > self.b

    def as_dict(self) -> Dict[str, object]:
        return {
            's': self.s, 'c': round(self.c, 6), 'd': self.d, 'a': self.a, 'b': self.b,
            'p': round(self.edge_probability, 6), 'attempts': self.attempts,
            'min_degree_a': self.min_degree_a, 'required_degree_a': self.required_degree_a,
            'min_degree_b': self.min_degree_b, 'required_degree_b': self.required_degree_b,
            'degree_ok': self.degree_ok, 'kds_free': self.kds_free,
            'kds_witness': list(self.kds_witness) if self.kds_witness else None,
            'counting_contradiction': self.counting_contradiction,
        }


@dataclass
class Construction:
    graph: BalancedBigraph
    s: int
    spec: GadgetSpec
    blocks: Optional[BlockSpec] = None
    identity: str = ''
    notes: Dict[str, object] = field(default_factory=dict)
    report: Optional[PropertyReport] = None

    @property
    def family(self) -> str:
        return self.spec.family

    def metadata(self) -> Dict[str, object]:
        meta: Dict[str, object] = {'family': self.spec.family}
        for key, value in self.spec.params.items():
            meta[key] = value
        for key, value in self.notes.items():
            meta[key] = value
        if self.identity:
            meta['identity'] = self.identity
        return meta

    def to_text(self) -> str:
        return write_graph(self.graph, self.s, self.metadata(), self.blocks)


def _assemble(
    n: int,
    u1: int,
    v1: int,
    cross_u1_v2: Sequence[FrozenSet[int]],
    cross_u2_v1: Sequence[FrozenSet[int]],
    complete_v1_u2: bool = False,
) -> Tuple[BalancedBigraph, BlockSpec]:
    """
    Complete diagonal blocks U1V1 and U2V2 plus the given cross edges.

    Cross rows use block-local indices: row i of ``cross_u1_v2`` lists
    V2-local neighbours of U1 vertex i, row i of ``cross_u2_v1`` lists
    V1-local neighbours of U2 vertex i.
    """
    v1_range = frozenset(range(v1))
    v2_range = frozenset(range(v1, n))
    adj_u: List[FrozenSet[int]] = []
    for i in range(u1):
        adj_u.append(v1_range | frozenset(v1 + t for t in cross_u1_v2[i]))
    for i in range(n - u1):
        extra = v1_range if complete_v1_u2 else frozenset(cross_u2_v1[i])
        adj_u.append(v2_range | extra)
    edges = ((u, v) for u, row in enumerate(adj_u) for v in row)
    G = BalancedBigraph.from_edges(n, edges)
    blocks = BlockSpec(range(u1), range(u1, n), range(v1), range(v1, n))
    return G, blocks


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SelfCheckError(message)


def zhao_gadget(s: int, k: int) -> Construction:
    """
    Balanced extremal graph on n = (2k+1)s with δ_U+δ_V = n+3s−6.

    Cross blocks are P(ks+1, s−2) on U1×V2 and P(ks+s−1, 2s−4) on U2×V1.
    """
    if s < 2 or k < 1:
        raise InvalidParameterError(f"zhao gadget needs s >= 2 and k >= 1, got s={s} k={k}")
    n = (2 * k + 1) * s
    small, large = k * s + 1, k * s + s - 1
    block_a = _p_block(small, s - 2)
    block_b = _p_block(large, 2 * s - 4)
    _check_p_block(block_a, s - 2)
    _check_p_block(block_b, 2 * s - 4)

    G, blocks = _assemble(n, small, large, block_a.adjacency, block_b.adjacency)
    profile = min_degrees(G, s)
    expected = n + 3 * s - 6
    _require(profile.delta_sum == expected, f"zhao({s},{k}): δ_U+δ_V = {profile.delta_sum}, expected {expected}")
    spec = GadgetSpec('zhao', {'s': s, 'k': k}, blocks.sizes)
    construction = Construction(
        G, s, spec, blocks,
        identity=f"δ_U+δ_V = {profile.delta_sum} = n+3s−6",
    )
    logger.info(f"Built zhao({s},{k}): n={n}, δ_U={profile.delta_u}, δ_V={profile.delta_v}")
    return construction


class _UnbalancedLayout(NamedTuple):
    n: int
    u1: int
    v1: int
    # (modulus, degree, deleted sources, degree floor) of U1'×V2 and of V1'×U2
    block_a: Tuple[int, int, int, int]
    block_b: Tuple[int, int, int, int]


def _unbalanced_layout(s: int, k: int, j: int, parity: str) -> _UnbalancedLayout:
    if parity not in ('even', 'odd'):
        raise InvalidParameterError(f"parity must be 'even' or 'odd', got {parity!r}")
    if s < 2:
        raise InvalidParameterError(f"unbalanced gadget needs s >= 2, got {s}")
    if j < 1:
        raise GadgetError(f"unbalanced gadget needs j >= 1, got j={j}")
    if k < j:
        raise GadgetError(f"unbalanced gadget needs k >= j, got k={k} j={j}")

    if parity == 'even':
        p_b, deleted = (2 * j + 1) * s - 5, (2 * j - 1) * s
        return _UnbalancedLayout(
            2 * k * s, (k - j) * s + 1, (k - j + 1) * s - 1,
            ((k + j - 1) * s + 1, s - 2, deleted, max(0, s - 3)),
            ((k + j) * s - 1, p_b, deleted, max(0, p_b - 1)),
        )
    p_b, deleted = (2 * j + 2) * s - 5, 2 * j * s
    return _UnbalancedLayout(
        (2 * k + 1) * s, (k - j) * s + 1, (k - j) * s + s - 1,
        ((k + j) * s + 1, s - 2, deleted, max(0, s - 3)),
        ((k + j) * s + s - 1, p_b, deleted, max(0, p_b - 1)),
    )


def _spread_guaranteed(m: int, p: int, count: int) -> bool:
    """Whether some field window of size p mod m has ``count`` pairwise disjoint translates."""
    if p <= 1:
        return count <= m
    q = int(nextprime(max(p, 3) - 1))
    order = q * q - 1
    return m >= 2 * order - 1 and m > (count - 1) * (q + 1) + order - 1


def unbalanced_min_k(s: int, j: int, parity: str) -> int:
    """Least k >= j at which both cross blocks of unbalanced_gadget are certain to be buildable."""
    k = j
    while True:
        layout = _unbalanced_layout(s, k, j, parity)
        if all(_spread_guaranteed(m, p, count) for m, p, count, _ in (layout.block_a, layout.block_b)):
            return k
        k += 1


def _connection_sets(m: int, p: int) -> Iterator[FrozenSet[int]]:
    seen: Set[FrozenSet[int]] = set()
    limit = get_search_config().sidon_step_limit
    try:
        searched = _search_sidon(m, p, limit)
    except _StepLimit:
        logger.debug(f"Sidon search mod {m} for size {p} gave up after {limit} steps")
        searched = None
    if searched is not None:
        seen.add(searched)
        yield searched
    for window in _field_windows(m, p):
        connection = frozenset(window)
        if connection not in seen:
            seen.add(connection)
            yield connection


def _thinned_block(m: int, p: int, count: int, floor: int) -> CrossBlock:
    """
    P(m, p) with ``count`` sources removed and every target degree kept >= floor.

    Connection sets are tried in turn, the searched Sidon set first and then
    field windows. Sources whose neighbourhoods are disjoint translates are
    offered to the deletion first.

    Raises:
        NoSidonSetError: no connection set of size p exists mod m
        FloorViolationError: every connection set lost the floor
    """
    failure: Optional[FloorViolationError] = None
    for connection in _connection_sets(m, p):
        block = CrossBlock.circulant(m, connection)
        _check_p_block(block, p)
        shifts = disjoint_shifts(m, connection, count) or ()
        try:
            kept, _ = delete_preserving_min_degree(block, count, floor, prefer=shifts)
            return kept
        except FloorViolationError as exc:
            logger.debug(f"P({m}, {p}) with {sorted(connection)} cannot lose {count} sources: {exc}")
            failure = exc
    if failure is None:
        raise NoSidonSetError(m, p)
    raise failure


def unbalanced_gadget(s: int, k: int, j: int, parity: str) -> Construction:
    """
    Gadget with δ_U+δ_V = n+3s−7 and δ_V−δ_U in [2sj−s−1, 2sj−1].

    Construction succeeds for every k >= unbalanced_min_k(s, j, parity) and
    often below it.

    Args:
        s: tile size, s >= 2
        k: scale; n = 2ks (even) or (2k+1)s (odd)
        j: imbalance, j >= 1
        parity: 'even' or 'odd'

    Raises:
        GadgetError: j < 1 or k < j
        NoSidonSetError: a cross block has no circulant at this k
        FloorViolationError: a cross block cannot keep its degree floor
    """
    layout = _unbalanced_layout(s, k, j, parity)
    n, u1, v1 = layout.n, layout.u1, layout.v1
    floor_a, floor_b = layout.block_a[3], layout.block_b[3]

    # U1' x V2: delete sources (U1' vertices) keeping V2 degrees >= floor_a
    kept_a = _thinned_block(*layout.block_a)

    # U2 x V1': delete V1' vertices keeping U2 degrees >= floor_b
    kept_b = _thinned_block(*layout.block_b)
    cross_u2_v1 = kept_b.transposed().adjacency

    _require(kept_a.sources == u1 and len(cross_u2_v1) == n - u1 and kept_b.sources == v1,
             f"unbalanced({s},{k},{j},{parity}): block sizes do not match")
    G, blocks = _assemble(n, u1, v1, kept_a.adjacency, cross_u2_v1)

    profile = min_degrees(G, s)
    expected = n + 3 * s - 7
    low, high = 2 * s * j - s - 1, 2 * s * j - 1
    _require(profile.delta_sum == expected,
             f"unbalanced({s},{k},{j},{parity}): δ_U+δ_V = {profile.delta_sum}, expected {expected}")
    _require(low <= profile.delta_gap <= high,
             f"unbalanced({s},{k},{j},{parity}): δ_V−δ_U = {profile.delta_gap} outside [{low}, {high}]")
    _require((kept_a.min_target_degree() or 0) >= floor_a and (kept_b.min_target_degree() or 0) >= floor_b,
             f"unbalanced({s},{k},{j},{parity}): degree floor lost after deletion")

    spec = GadgetSpec(f'unbalanced_{parity}', {'s': s, 'k': k, 'j': j}, blocks.sizes)
    construction = Construction(
        G, s, spec, blocks,
        identity=(f"δ_U+δ_V = {profile.delta_sum} = n+3s−7; "
                  f"δ_V−δ_U = {profile.delta_gap} in [{low}, {high}]"),
    )
    logger.info(
        f"Built unbalanced_{parity}({s},{k},{j}): n={n}, δ_U={profile.delta_u}, δ_V={profile.delta_v}"
    )
    return construction


def sqrt_gadget(s: int, k1: int) -> Construction:
    """
    Gadget with δ_U+δ_V = n+2s−2⌈√s⌉+c(s)−1.

    Every U1 vertex gets s−x private neighbours in V2; k2 is the least
    value with k2 >= s·k1 and |V2| > (s−x)|U1|.
    """
    if s < 2 or k1 < 1:
        raise InvalidParameterError(f"sqrt gadget needs s >= 2 and k1 >= 1, got s={s} k1={k1}")
    p, q = square_split(s)
    root = ceil_sqrt(s)
    x = root - 1 if 1 <= q <= p else root
    y = root
    _require(x * y >= s, f"sqrt({s}): x·y = {x * y} < s")

    u1, v1 = k1 * s + y, k1 * s + s - 1
    need = (s - x) * u1
    k2 = max(s * k1, (need + s - 1) // s + 1)
    v2 = k2 * s - s + 1
    if v2 < need:
        raise CapacityError(f"|V2| = {v2} < (s−x)|U1| = {need}")
    n = (k1 + k2) * s

    private = [frozenset(range(i * (s - x), (i + 1) * (s - x))) for i in range(u1)]
    G, blocks = _assemble(n, u1, v1, private, (), complete_v1_u2=True)

    profile = min_degrees(G, s)
    expected = n + 2 * s - 2 * root + c_of_s(s) - 1
    _require(profile.delta_sum == expected,
             f"sqrt({s},{k1}): δ_U+δ_V = {profile.delta_sum}, expected {expected}")

    spec = GadgetSpec('sqrt_gadget', {'s': s, 'k1': k1}, blocks.sizes)
    construction = Construction(
        G, s, spec, blocks,
        identity=f"x={x} y={y} xy={x * y} ≥ s; δ_U+δ_V = {profile.delta_sum} = n+2s−2⌈√s⌉+c(s)−1",
        notes={'k2': k2, 'x': x, 'y': y},
    )
    logger.info(f"Built sqrt_gadget({s},{k1}): n={n}, k2={k2}, x={x}, y={y}")
    return construction


def _cube_root_exponent(s: int) -> float:
    root = round(s ** (1 / 3))
    for candidate in (root - 1, root, root + 1):
        if candidate > 0 and candidate ** 3 == s:
            return float(candidate)
    return s ** (1 / 3)


def _find_kds(rows: Sequence[int], d: int, s: int) -> Optional[Tuple[int, ...]]:
    """d rows of A whose common B-neighbourhood has size >= s, if any."""
    chosen: List[int] = []

    def search(start: int, common: int) -> bool:
        if len(chosen) == d:
            return True
        for i in range(start, len(rows) - (d - len(chosen)) + 1):
            narrowed = common & rows[i]
            if popcount(narrowed) < s:
                continue
            chosen.append(i)
            if search(i + 1, narrowed):
                return True
            chosen.pop()
        return False

    everything = 0
    for row in rows:
        everything |= row
    return tuple(chosen) if search(0, everything) else None


def random_lower_gadget(s: int, n: Optional[int] = None, seed: int = 0,
                        retry_cap: Optional[int] = None) -> Construction:
    """
    Random graph H on A ∪ B plus A′ complete to every V-vertex.

    With c = s^{1/3}, d = ⌈2c⌉, a = ⌈s^c⌉, b = ⌈s·a/d⌉ and edge probability
    min(1, 3d/s). The sample is kept once every A-vertex has degree >= 2a,
    every B-vertex has degree >= 2d·a/s, and no d vertices of A share s
    neighbours in B.

    Raises:
        CapacityError: n < max(a, b)
        RetryExhaustedError: no sample passed within the retry cap
    """
    if s < 2:
        raise InvalidParameterError(f"random lower gadget needs s >= 2, got {s}")
    c = _cube_root_exponent(s)
    d = max(2, math.ceil(2 * c - 1e-9))
    a = math.ceil(s ** c - 1e-9)
    b = -(-s * a // d)
    probability = min(1.0, 3 * d / s)
    if n is None:
        n = max(a, b)
    if n < max(a, b):
        raise CapacityError(f"n={n} cannot host |A|={a} and |B|={b}")
    cap = retry_cap if retry_cap is not None else get_search_config().random_retry_cap
    required_a = 2 * a
    required_b = math.ceil(Fraction(2 * d * a, s))

    rng = random.Random(seed)
    report = None
    for attempt in range(1, cap + 1):
        rows = [0] * a
        for u in range(a):
            for v in range(b):
                if rng.random() < probability:
                    rows[u] |= 1 << v
        deg_b = [sum(1 for u in range(a) if rows[u] >> v & 1) for v in range(b)]
        report = PropertyReport(
            s=s, c=c, d=d, a=a, b=b, edge_probability=probability, attempts=attempt,
            min_degree_a=min(popcount(r) for r in rows),
            min_degree_b=min(deg_b),
            required_degree_a=required_a,
            required_degree_b=required_b,
        )
        if report.degree_ok:
            report.kds_witness = _find_kds(rows, d, s)
        if report.passed:
            break
        logger.debug(f"random_lower({s}) attempt {attempt} rejected: {report.as_dict()}")
    else:
        logger.warning(f"random_lower({s}, seed={seed}) exhausted {cap} attempts")
        raise RetryExhaustedError(report, cap)

    all_v = frozenset(range(n))
    adj_u = [frozenset(bits(rows[u])) for u in range(a)] + [all_v] * (n - a)
    G = BalancedBigraph.from_edges(n, ((u, v) for u, row in enumerate(adj_u) for v in row))
    profile = min_degrees(G, s)
    _require(profile.delta_sum >= n + a,
             f"random_lower({s}): δ_U+δ_V = {profile.delta_sum} < n + a = {n + a}")
    spec = GadgetSpec('random_lower', {'s': s, 'n': n, 'seed': seed})
    return Construction(
        G, s, spec,
        identity=f"δ_U+δ_V = {profile.delta_sum} >= n+a = {n + a}",
        notes={'a': a, 'b': b, 'd': d},
        report=report,
    )


def random_bigraph(n: int, rate: float, seed: int = 0, s: int = 1) -> Construction:
    """Each of the n² possible edges present independently with probability ``rate``."""
    if n < 0 or not 0 <= rate <= 1:
        raise InvalidParameterError(f"random bigraph needs n >= 0 and 0 <= rate <= 1, got n={n} rate={rate}")
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(n) if rng.random() < rate]
    G = BalancedBigraph.from_edges(n, edges)
    spec = GadgetSpec('random_bigraph', {'n': n, 'rate': rate, 'seed': seed})
    return Construction(G, s, spec)


def planted_extremal(n: int, s: int, a: int, removal: float = 0.02, noise: float = 0.01,
                     seed: int = 0) -> Construction:
    """
    Two complete diagonal blocks of sizes a and n−a with random damage.

    Diagonal edges are dropped with probability ``removal``; cross edges
    appear with probability ``noise``.
    """
    if not 0 < a < n:
        raise InvalidParameterError(f"planted block size must satisfy 0 < a < n, got a={a} n={n}")
    rng = random.Random(seed)
    edges = []
    for u in range(n):
        for v in range(n):
            diagonal = (u < a) == (v < a)
            if diagonal and rng.random() >= removal:
                edges.append((u, v))
            elif not diagonal and rng.random() < noise:
                edges.append((u, v))
    G = BalancedBigraph.from_edges(n, edges)
    blocks = BlockSpec(range(a), range(a, n), range(a), range(a, n))
    spec = GadgetSpec('planted_extremal',
                      {'n': n, 's': s, 'a': a, 'removal': removal, 'noise': noise, 'seed': seed},
                      blocks.sizes)
    return Construction(G, s, spec, blocks)


def _build_p_graph(m: int, p: int, s: int = 1) -> Construction:
    G = p_graph(m, p)
    spec = GadgetSpec('p_graph', {'m': m, 'p': p})
    return Construction(G, s, spec, identity=f"{p}-regular, K_{{2,2}}-free on {m}+{m} vertices")


FAMILIES: Dict[str, Callable[..., Construction]] = {
    'p_graph': _build_p_graph,
    'zhao': zhao_gadget,
    'unbalanced_even': lambda s, k, j: unbalanced_gadget(s, k, j, 'even'),
    'unbalanced_odd': lambda s, k, j: unbalanced_gadget(s, k, j, 'odd'),
    'unbalanced': unbalanced_gadget,
    'sqrt_gadget': sqrt_gadget,
    'random_lower': random_lower_gadget,
    'random_bigraph': random_bigraph,
    'planted_extremal': planted_extremal,
}

ALIASES = {
    'pgraph': 'p_graph',
    'sqrt': 'sqrt_gadget',
    'random': 'random_lower',
    'planted': 'planted_extremal',
}


def canonical_family(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in FAMILIES:
        raise InvalidParameterError(
            f"unknown family {name!r}; expected one of {', '.join(sorted(FAMILIES))}"
        )
    return name


def build(family: str, **params) -> Construction:
    """
    Build a construction by family name.

    Args:
        family: canonical name or alias
        **params: the family's keyword parameters

    Raises:
        InvalidParameterError: unknown family or parameter names
        GadgetError: the construction itself failed
    """
    name = canonical_family(family)
    try:
        return FAMILIES[name](**params)
    except TypeError as exc:
        raise InvalidParameterError(f"bad parameters for {name}: {exc}") from exc
