"""
Balanced bipartite graph core.

Vertices are dense integer indices 0..n-1 on each side. Graphs are
immutable once built; every search in the app reads neighbourhoods as
Python-int bitmasks so intersections and cardinalities stay cheap.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Tuple

from tiling.exceptions import BlockPartitionError, EmptyPartError, InvalidGraphError, MixedPartError

logger = logging.getLogger(__name__)


class Side(str, Enum):
    U = 'U'
    V = 'V'

    @property
    def other(self) -> 'Side':
        return Side.V if self is Side.U else Side.U


class Vertex(NamedTuple):
    side: Side
    index: int


def popcount(mask: int) -> int:
    return bin(mask).count('1')


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class BalancedBigraph:
    """
    Bipartite graph G[U, V] with |U| = |V| = n.

    ``adj_u[u]`` holds the V-neighbours of u and ``adj_v[v]`` the
    U-neighbours of v; the two are exact mirrors.
    """

    n: int
    adj_u: Tuple[FrozenSet[int], ...]
    adj_v: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        if self.n < 0:
            raise InvalidGraphError(f"part size must be non-negative, got {self.n}")
        if len(self.adj_u) != self.n or len(self.adj_v) != self.n:
            raise InvalidGraphError(
                f"adjacency lengths {len(self.adj_u)}/{len(self.adj_v)} do not match n={self.n}"
            )
        for u, nbrs in enumerate(self.adj_u):
            for v in nbrs:
                if not 0 <= v < self.n:
                    raise InvalidGraphError(f"U{u} has out-of-range neighbour V{v}")
                if u not in self.adj_v[v]:
                    raise InvalidGraphError(f"edge U{u}-V{v} missing from the V-side mirror")
        if sum(len(a) for a in self.adj_u) != sum(len(a) for a in self.adj_v):
            raise InvalidGraphError("U-side and V-side adjacency disagree on the edge count")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> 'BalancedBigraph':
        adj_u: List[set] = [set() for _ in range(n)]
        adj_v: List[set] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidGraphError(f"edge ({u}, {v}) out of range for n={n}")
            adj_u[u].add(v)
            adj_v[v].add(u)
        return cls(n, tuple(frozenset(a) for a in adj_u), tuple(frozenset(a) for a in adj_v))

    @classmethod
    def empty(cls, n: int) -> 'BalancedBigraph':
        return cls.from_edges(n, ())

    @classmethod
    def complete(cls, n: int) -> 'BalancedBigraph':
        return cls.from_edges(n, ((u, v) for u in range(n) for v in range(n)))

    # Queries

    def adjacency(self, side: Side) -> Tuple[FrozenSet[int], ...]:
        return self.adj_u if side is Side.U else self.adj_v

    def neighbors(self, side: Side, x: int) -> FrozenSet[int]:
        return self.adjacency(side)[x]

    def degree(self, side: Side, x: int) -> int:
        return len(self.adjacency(side)[x])

    def degree_into(self, side: Side, x: int, targets: FrozenSet[int]) -> int:
        return len(self.adjacency(side)[x] & targets)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj_u[u]

    def edges(self) -> List[Tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in sorted(self.adj_u[u])]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj_u)

    @cached_property
    def masks_u(self) -> Tuple[int, ...]:
        return tuple(mask_of(a) for a in self.adj_u)

    @cached_property
    def masks_v(self) -> Tuple[int, ...]:
        return tuple(mask_of(a) for a in self.adj_v)

    def masks(self, side: Side) -> Tuple[int, ...]:
        return self.masks_u if side is Side.U else self.masks_v

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    # Derived graphs

    def transposed(self) -> 'BalancedBigraph':
        """Swap the roles of U and V."""
        return BalancedBigraph(self.n, self.adj_v, self.adj_u)

    def induced(self, us: Iterable[int], vs: Iterable[int]) -> Tuple['BalancedBigraph', Tuple[int, ...], Tuple[int, ...]]:
        """
        Induced subgraph on equal-size vertex sets.

        Returns:
            (H, u_labels, v_labels) where vertex i of H is u_labels[i] / v_labels[i] in G
        """
        u_labels = tuple(sorted(set(us)))
        v_labels = tuple(sorted(set(vs)))
        if len(u_labels) != len(v_labels):
            raise InvalidGraphError(
                f"induced subgraph needs equal parts, got {len(u_labels)} and {len(v_labels)}"
            )
        v_index = {v: i for i, v in enumerate(v_labels)}
        edges = [
            (i, v_index[v])
            for i, u in enumerate(u_labels)
            for v in self.adj_u[u]
            if v in v_index
        ]
        return BalancedBigraph.from_edges(len(u_labels), edges), u_labels, v_labels


@dataclass(frozen=True)
class DegreeProfile:
    """
    One-sided minimum degrees and the decomposition δ_U = k1·s + s + r.

    k1, r and k2 are reported only when δ_U ≥ s and s divides n.
    """

    n: int
    s: int
    delta_u: int
    delta_v: int
    k1: Optional[int] = None
    r: Optional[int] = None
    k2: Optional[int] = None

    @property
    def m(self) -> Optional[int]:
        return self.n // self.s if self.n % self.s == 0 else None

    @property
    def delta_sum(self) -> int:
        return self.delta_u + self.delta_v

    @property
    def delta_gap(self) -> int:
        return self.delta_v - self.delta_u

    @property
    def decomposed(self) -> bool:
        return self.k1 is not None


def min_degrees(G: BalancedBigraph, s: int) -> DegreeProfile:
    if G.n < 1:
        raise EmptyPartError("degree profile needs n >= 1")
    delta_u = min(len(a) for a in G.adj_u)
    delta_v = min(len(a) for a in G.adj_v)
    if delta_u < s or G.n % s:
        return DegreeProfile(G.n, s, delta_u, delta_v)
    k1, r = divmod(delta_u - s, s)
    return DegreeProfile(G.n, s, delta_u, delta_v, k1=k1, r=r, k2=G.n // s - k1)


def density(G: BalancedBigraph, A: Iterable[int], B: Iterable[int]) -> Fraction:
    """Exact edge density e(A, B) / (|A||B|) for A ⊆ U, B ⊆ V."""
    A = frozenset(A)
    B = frozenset(B)
    if not A or not B:
        raise EmptyPartError("density needs two nonempty vertex sets")
    edges = sum(len(G.adj_u[a] & B) for a in A)
    return Fraction(edges, len(A) * len(B))


def common_neighborhood(G: BalancedBigraph, S: Iterable, side: Optional[Side] = None) -> FrozenSet[int]:
    """
    Intersection of the neighbourhoods of the vertices in S.

    Elements of S are either :class:`Vertex` tuples or plain indices on
    ``side``. An empty S yields the whole opposite part.
    """
    indices = []
    for item in S:
        if isinstance(item, Vertex):
            item_side, index = Side(item.side), item.index
        else:
            if side is None:
                raise MixedPartError("plain indices need an explicit side")
            item_side, index = side, item
        if side is None:
            side = item_side
        elif item_side is not side:
            raise MixedPartError("vertex set mixes U and V")
        indices.append(index)
    side = side or Side.U
    mask = G.full_mask
    own = G.masks(side)
    for index in indices:
        mask &= own[index]
    return frozenset(bits(mask))


@dataclass(frozen=True, order=True)
class KssCopy:
    us: Tuple[int, ...]
    vs: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'us', tuple(sorted(self.us)))
        object.__setattr__(self, 'vs', tuple(sorted(self.vs)))

    def relabel(self, u_labels, v_labels) -> 'KssCopy':
        return KssCopy(tuple(u_labels[u] for u in self.us), tuple(v_labels[v] for v in self.vs))

    def transposed(self) -> 'KssCopy':
        return KssCopy(self.vs, self.us)


@dataclass(frozen=True)
class Tiling:
    s: int
    copies: Tuple[KssCopy, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.copies)

    def relabel(self, u_labels, v_labels) -> 'Tiling':
        return Tiling(self.s, tuple(c.relabel(u_labels, v_labels) for c in self.copies))

    def transposed(self) -> 'Tiling':
        return Tiling(self.s, tuple(c.transposed() for c in self.copies))

    def merged(self, *others: 'Tiling') -> 'Tiling':
        copies = list(self.copies)
        for other in others:
            copies.extend(other.copies)
        return Tiling(self.s, tuple(copies))


@dataclass(frozen=True)
class TilingCheck:
    ok: bool
    violation: Optional[str] = None
    copy_index: Optional[int] = None

    def __bool__(self):
        return self.ok


def verify_tiling(G: BalancedBigraph, T: Tiling) -> TilingCheck:
    """
    Check that T is a K_{s,s}-tiling of G.

    Copies are checked in order; the first violation found is reported.
    """
    s = T.s
    if s < 1:
        return TilingCheck(False, f"block size must be positive, got {s}")
    seen_u: Dict[int, int] = {}
    seen_v: Dict[int, int] = {}
    for index, copy in enumerate(T.copies):
        if len(set(copy.us)) != s or len(set(copy.vs)) != s:
            return TilingCheck(False, f"copy {index} has {len(set(copy.us))}+{len(set(copy.vs))} vertices, expected {s}+{s}", index)
        for u in copy.us:
            if not 0 <= u < G.n:
                return TilingCheck(False, f"copy {index} uses out-of-range vertex U{u}", index)
            if u in seen_u:
                return TilingCheck(False, f"copy {index} overlaps copy {seen_u[u]} at U{u}", index)
        for v in copy.vs:
            if not 0 <= v < G.n:
                return TilingCheck(False, f"copy {index} uses out-of-range vertex V{v}", index)
            if v in seen_v:
                return TilingCheck(False, f"copy {index} overlaps copy {seen_v[v]} at V{v}", index)
        for u in copy.us:
            missing = [v for v in copy.vs if v not in G.adj_u[u]]
            if missing:
                return TilingCheck(False, f"copy {index} misses edge U{u}-V{missing[0]}", index)
        for u in copy.us:
            seen_u[u] = index
        for v in copy.vs:
            seen_v[v] = index
    if len(seen_u) != G.n or len(seen_v) != G.n:
        uncovered = sorted(set(range(G.n)) - set(seen_u))
        label = f"U{uncovered[0]}" if uncovered else f"V{sorted(set(range(G.n)) - set(seen_v))[0]}"
        return TilingCheck(False, f"copies leave {label} uncovered")
    return TilingCheck(True)


@dataclass(frozen=True)
class BlockSpec:
    """A four-block split U = U1 ∪ U2, V = V1 ∪ V2."""

    u1: FrozenSet[int]
    u2: FrozenSet[int]
    v1: FrozenSet[int]
    v2: FrozenSet[int]

    def __post_init__(self):
        for name in ('u1', 'u2', 'v1', 'v2'):
            object.__setattr__(self, name, frozenset(getattr(self, name)))

    def as_dict(self) -> Dict[str, FrozenSet[int]]:
        return {'U1': self.u1, 'U2': self.u2, 'V1': self.v1, 'V2': self.v2}

    @property
    def sizes(self) -> Tuple[int, int, int, int]:
        return len(self.u1), len(self.u2), len(self.v1), len(self.v2)

    def validate(self, n: int) -> None:
        everything = frozenset(range(n))
        for label, first, second in (('U', self.u1, self.u2), ('V', self.v1, self.v2)):
            if first & second:
                raise BlockPartitionError(f"{label}1 and {label}2 overlap at {min(first & second)}")
            if first | second != everything:
                stray = sorted((first | second) ^ everything)
                raise BlockPartitionError(
                    f"{label}1 ∪ {label}2 is not {label}: offending index {stray[0]}"
                )
