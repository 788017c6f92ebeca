"""
Constructive tiling for graphs close to the two-block extremal shape.

Stages: detect a sparse pair (U1', V2'), split U and V into six blocks,
mark movable vertices, balance the diagonal block pairs with star moves,
absorb the exceptional vertices into private copies, tile the two
near-complete blocks, stitch. Any stage that cannot proceed falls back to
exact_tile, so the pipeline only ever speeds things up.
"""

import logging
from dataclasses import dataclass, field, replace
from decimal import Decimal, localcontext
from fractions import Fraction
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from tiling.exceptions import (
    AbsorptionError,
    BalanceError,
    BlockTilingError,
    ClaimViolationError,
    InvalidParameterError,
    PipelineError,
)
from tiling.utils.bigraph import (
    BalancedBigraph,
    KssCopy,
    Side,
    Tiling,
    bits,
    density,
    mask_of,
    min_degrees,
    popcount,
    verify_tiling,
)
from tiling.utils.thresholds import ceil_sqrt, square_split
from .config import get_search_config, parse_alpha
from .stars import StarSystems, SystemOutcome, bidirectional_star_systems, split_kss, star_bounds
from .tiler import TileResult, Verdict, exact_tile, greedy_tile

logger = logging.getLogger(__name__)


def _icbrt(x: int) -> Optional[int]:
    root = round(x ** (1 / 3))
    for candidate in (root - 1, root, root + 1):
        if candidate >= 0 and candidate ** 3 == x:
            return candidate
    return None


def cube_root(alpha: Fraction) -> Fraction:
    """α^{1/3}: exact for rational cubes, otherwise to 60 significant digits."""
    top, bottom = _icbrt(alpha.numerator), _icbrt(alpha.denominator)
    if top is not None and bottom is not None:
        return Fraction(top, bottom)
    with localcontext() as ctx:
        ctx.prec = 60
        value = (Decimal(alpha.numerator) / Decimal(alpha.denominator)) ** (Decimal(1) / Decimal(3))
    return Fraction(value)


@dataclass(frozen=True)
class BlockPartition:
    u0: FrozenSet[int]
    u1: FrozenSet[int]
    u2: FrozenSet[int]
    v0: FrozenSet[int]
    v1: FrozenSet[int]
    v2: FrozenSet[int]
    alpha: Fraction
    k1: int
    k2: int
    movable_u: FrozenSet[int] = frozenset()
    movable_v: FrozenSet[int] = frozenset()
    reserved: Tuple[KssCopy, ...] = ()
    # exceptional or moved vertices waiting for a private copy: (vertex, side 1 or 2)
    assign_u: Tuple[Tuple[int, int], ...] = ()
    assign_v: Tuple[Tuple[int, int], ...] = ()

    def reserved_u(self) -> FrozenSet[int]:
        return frozenset(u for copy in self.reserved for u in copy.us)

    def reserved_v(self) -> FrozenSet[int]:
        return frozenset(v for copy in self.reserved for v in copy.vs)

    def sizes(self) -> Dict[str, int]:
        return {
            'U0': len(self.u0), 'U1': len(self.u1), 'U2': len(self.u2),
            'V0': len(self.v0), 'V1': len(self.v1), 'V2': len(self.v2),
        }

    def residual(self) -> Tuple[FrozenSet[int], FrozenSet[int], FrozenSet[int], FrozenSet[int]]:
        """Unreserved (U1, V1, U2, V2) block members."""
        ru, rv = self.reserved_u(), self.reserved_v()
        return self.u1 - ru, self.v1 - rv, self.u2 - ru, self.v2 - rv

    def side_one_counts(self) -> Tuple[int, int]:
        """Vertices that will end up in the side-1 near-complete block."""
        u1, v1, _, _ = self.residual()
        pending_u = {x for x, _ in self.assign_u}
        pending_v = {y for y, _ in self.assign_v}
        a = len(u1 - pending_u) + sum(1 for x, side in self.assign_u if side == 1 and x not in self.u1)
        b = len(v1 - pending_v) + sum(1 for y, side in self.assign_v if side == 1 and y not in self.v1)
        return a, b


@dataclass
class StageTrace:
    stage: str
    detail: str

    def line(self) -> str:
        return f"{self.stage}: {self.detail}"


@dataclass
class PipelineResult:
    verdict: Verdict
    tiling: Optional[Tiling] = None
    nodes: int = 0
    fallback: bool = False
    reason: Optional[str] = None
    trace: List[StageTrace] = field(default_factory=list)

    def trace_lines(self) -> List[str]:
        return [entry.line() for entry in self.trace]


def _degree(masks: Sequence[int], x: int, target: int) -> int:
    return popcount(masks[x] & target)


def _smallest(candidates: Iterable[int], count: int, key) -> FrozenSet[int]:
    return frozenset(sorted(candidates, key=lambda x: (key(x), x))[:count])


def _alternate(G: BalancedBigraph, k1s: int, k2s: int, v2: FrozenSet[int], rounds: int):
    masks_u, masks_v = G.masks_u, G.masks_v
    u1: FrozenSet[int] = frozenset()
    for _ in range(rounds):
        v2_mask = mask_of(v2)
        next_u1 = _smallest(range(G.n), k1s, lambda x: _degree(masks_u, x, v2_mask))
        u1_mask = mask_of(next_u1)
        next_v2 = _smallest(range(G.n), k2s, lambda y: _degree(masks_v, y, u1_mask))
        if next_u1 == u1 and next_v2 == v2:
            break
        u1, v2 = next_u1, next_v2
    return u1, v2, density(G, u1, v2)


def detect_extremal(G: BalancedBigraph, s: int, alpha=None,
                    rounds: Optional[int] = None) -> Optional[Tuple[FrozenSet[int], FrozenSet[int]]]:
    """
    Look for U1' ⊆ U, V2' ⊆ V with |U1'| = k1·s, |V2'| = k2·s and density at most α.

    Two starting points are alternated to a fixpoint: the k2·s V-vertices
    of smallest degree, and the non-neighbours of the minimum-degree
    U-vertex. The sparser result is kept.

    Returns:
        (U1', V2') or None when no sparse pair is found
    """
    alpha = parse_alpha(alpha if alpha is not None else get_search_config().alpha)
    rounds = rounds if rounds is not None else get_search_config().detect_rounds
    if G.n == 0 or G.n % s:
        return None
    profile = min_degrees(G, s)
    if not profile.decomposed or profile.k1 < 1 or profile.k2 < 1:
        return None
    k1s, k2s = profile.k1 * s, profile.k2 * s

    starts = []
    starts.append(_smallest(range(G.n), k2s, lambda y: G.degree(Side.V, y)))
    anchor = min(range(G.n), key=lambda x: (G.degree(Side.U, x), x))
    anchor_nbrs = G.neighbors(Side.U, anchor)
    starts.append(_smallest(range(G.n), k2s, lambda y: (y in anchor_nbrs, G.degree(Side.V, y))))

    best = None
    for v2 in starts:
        u1, v2, d = _alternate(G, k1s, k2s, v2, rounds)
        if best is None or d < best[2]:
            best = (u1, v2, d)
    u1, v2, d = best
    logger.debug(f"detect_extremal: best density {d} (α={alpha}, k1s={k1s}, k2s={k2s})")
    if d <= alpha:
        return u1, v2
    return None


def _min_into(masks, X: Iterable[int], target: FrozenSet[int]) -> Optional[int]:
    t = mask_of(target)
    values = [_degree(masks, x, t) for x in X]
    return min(values) if values else None


def _max_into(masks, X: Iterable[int], target: FrozenSet[int]) -> Optional[int]:
    t = mask_of(target)
    values = [_degree(masks, x, t) for x in X]
    return max(values) if values else None


def preprocess(G: BalancedBigraph, s: int, U1p: Iterable[int], V2p: Iterable[int], alpha=None) -> BlockPartition:
    """
    Six-block partition from a detected sparse pair, with its size and degree checks.

    Vertices meeting both the side-1 and side-2 membership tests go to the
    side where their normalised degree is larger.

    Raises:
        ClaimViolationError: a size or degree bound fails on the produced blocks
    """
    alpha = parse_alpha(alpha if alpha is not None else get_search_config().alpha)
    t = cube_root(alpha)
    t2 = t * t
    U1p, V2p = frozenset(U1p), frozenset(V2p)
    n = G.n
    K1, K2 = len(U1p), len(V2p)
    if K1 + K2 != n or K1 % s or K2 % s:
        raise ClaimViolationError('partition', f"|U1'|={K1}, |V2'|={K2} do not split n={n} into multiples of s")
    everything = frozenset(range(n))
    U2p, V1p = everything - U1p, everything - V2p
    masks_u, masks_v = G.masks_u, G.masks_v
    m_v1p, m_v2p, m_u1p, m_u2p = mask_of(V1p), mask_of(V2p), mask_of(U1p), mask_of(U2p)

    u1, u2, v1, v2 = set(), set(), set(), set()
    for x in range(n):
        d1, d2 = _degree(masks_u, x, m_v1p), _degree(masks_u, x, m_v2p)
        in1 = d2 < t * K1
        in2 = d1 < t * K1 or d2 > (1 - t) * K2
        if in1 and in2:
            in1 = d1 * K2 >= d2 * K1
            in2 = not in1
        if in1:
            u1.add(x)
        elif in2:
            u2.add(x)
    for y in range(n):
        d1, d2 = _degree(masks_v, y, m_u1p), _degree(masks_v, y, m_u2p)
        in2 = d1 < t * K2
        in1 = d2 < t * K2 or d1 > (1 - t) * K1
        if in1 and in2:
            in1 = d1 * K2 >= d2 * K1
            in2 = not in1
        if in1:
            v1.add(y)
        elif in2:
            v2.add(y)
    P = BlockPartition(
        u0=frozenset(everything - u1 - u2), u1=frozenset(u1), u2=frozenset(u2),
        v0=frozenset(everything - v1 - v2), v1=frozenset(v1), v2=frozenset(v2),
        alpha=alpha, k1=K1 // s, k2=K2 // s,
    )
    for item, ok, detail in claim_checks(G, P, s):
        if not ok:
            raise ClaimViolationError(item, detail)
    return P


def claim_checks(G: BalancedBigraph, P: BlockPartition, s: int) -> List[Tuple[str, bool, str]]:
    """Every size and degree bound a preprocessed partition must meet, as (item, holds, detail)."""
    t = cube_root(P.alpha)
    t2 = t * t
    n = G.n
    K1, K2 = P.k1 * s, P.k2 * s
    masks_u, masks_v = G.masks_u, G.masks_v
    checks: List[Tuple[str, bool, str]] = []

    covers = (P.u0 | P.u1 | P.u2) == frozenset(range(n)) == (P.v0 | P.v1 | P.v2)
    disjoint = not (P.u0 & P.u1 or P.u0 & P.u2 or P.u1 & P.u2 or P.v0 & P.v1 or P.v0 & P.v2 or P.v1 & P.v2)
    checks.append(('partition', covers and disjoint, 'blocks partition U and V'))

    low, high = K1 - t2 * K2, K1 + t2 * K1
    checks.append(('block-1-size', all(low <= size <= high for size in (len(P.u1), len(P.v1))),
                   f"|U1|={len(P.u1)}, |V1|={len(P.v1)} within [{float(low):.2f}, {float(high):.2f}]"))
    low, high = K2 - t2 * K1, K2 + t2 * K2
    checks.append(('block-2-size', all(low <= size <= high for size in (len(P.u2), len(P.v2))),
                   f"|U2|={len(P.u2)}, |V2|={len(P.v2)} within [{float(low):.2f}, {float(high):.2f}]"))
    checks.append(('exceptional-size', len(P.u0) <= t2 * n and len(P.v0) <= t2 * n,
                   f"|U0|={len(P.u0)}, |V0|={len(P.v0)} at most {float(t2 * n):.2f}"))

    # (exceptional block, target block, floor) per side
    exceptional = (
        ('exceptional-degree-u', masks_u, ((P.u0, P.v1, t * K1 - t2 * K2, 'δ(U0,V1)'),
                                           (P.u0, P.v2, t * K1 - t2 * K1, 'δ(U0,V2)'))),
        ('exceptional-degree-v', masks_v, ((P.v0, P.u1, t * K2 - t2 * K2, 'δ(V0,U1)'),
                                           (P.v0, P.u2, t * K2 - t2 * K1, 'δ(V0,U2)'))),
    )
    for item, masks, bounds in exceptional:
        ok, notes = True, []
        for source, target, floor, label in bounds:
            value = _min_into(masks, source, target)
            if value is not None:
                ok = ok and value >= floor
            notes.append(f"{label}={'-' if value is None else value} vs {float(floor):.2f}")
        checks.append((item, ok, ', '.join(notes)))

    diagonal_ok = True
    notes = []
    for (us, vs, own, other) in ((P.u1, P.v1, K1, K2), (P.u2, P.v2, K2, K1)):
        bound = own - t * own - t2 * other
        for value in (_min_into(masks_u, us, vs), _min_into(masks_v, vs, us)):
            if value is not None:
                notes.append(value)
                diagonal_ok = diagonal_ok and value >= bound
    checks.append(('diagonal-min-degree', diagonal_ok, f"diagonal minimum degrees {notes}"))

    cross_u = _max_into(masks_u, P.u1, P.v2) or 0
    cross_v = _max_into(masks_v, P.v2, P.u1) or 0
    checks.append(('cross-max-degree', cross_u <= 2 * t * K1 and cross_v <= 2 * t * K2,
                   f"Δ(U1,V2)={cross_u} vs {float(2 * t * K1):.2f}, Δ(V2,U1)={cross_v} vs {float(2 * t * K2):.2f}"))
    return checks


def classify_movable(G: BalancedBigraph, P: BlockPartition, s: int) -> BlockPartition:
    """
    Mark U2 vertices with many V1-neighbours and V1 vertices with many U2-neighbours.

    "Many" means strictly more than α^{1/3}·n.
    """
    limit = cube_root(P.alpha) * G.n
    masks_u, masks_v = G.masks_u, G.masks_v
    m_v1, m_v2, m_u1, m_u2 = mask_of(P.v1), mask_of(P.v2), mask_of(P.u1), mask_of(P.u2)
    stray_u = [x for x in sorted(P.u1) if _degree(masks_u, x, m_v2) > limit]
    stray_v = [y for y in sorted(P.v2) if _degree(masks_v, y, m_u1) > limit]
    if stray_u or stray_v:
        raise ClaimViolationError('movable-empty', f"U1 or V2 holds vertices with cross degree above {float(limit):.2f}")
    movable_u = frozenset(x for x in P.u2 if _degree(masks_u, x, m_v1) > limit)
    movable_v = frozenset(y for y in P.v1 if _degree(masks_v, y, m_u2) > limit)
    return replace(P, movable_u=movable_u, movable_v=movable_v)


# Move kinds: (name, change in side-1 U count, change in side-1 V count) for s and x
def _move_effects(s: int, x: Optional[int]) -> Dict[str, Tuple[int, int]]:
    effects = {
        'u1-v2': (-1, 0),
        'u2-v1': (-(s - 1), -s),
        'v1-u2': (0, -1),
        'v2-u1': (-s, -(s - 1)),
    }
    if x is not None:
        effects['sqrt'] = (-1, -x)
    return effects


def _sqrt_x(s: int) -> Optional[int]:
    p, q = square_split(s)
    root = ceil_sqrt(s)
    x = root - 1 if 1 <= q <= p else root
    return x if 1 <= x <= s - 1 else None


@dataclass(frozen=True)
class _Plan:
    moves: Tuple[Tuple[str, int], ...]
    split_u: Optional[int]
    split_v: Optional[int]
    target: int
    flex_u_side1: int
    flex_v_side1: int
    cost: Tuple


def _affinity(masks, x: int, block1: FrozenSet[int], block2: FrozenSet[int]) -> Fraction:
    d1 = Fraction(_degree(masks, x, mask_of(block1)), max(1, len(block1)))
    d2 = Fraction(_degree(masks, x, mask_of(block2)), max(1, len(block2)))
    return d1 - d2


def _plans(G: BalancedBigraph, P: BlockPartition, s: int, limit: int) -> List[_Plan]:
    x = _sqrt_x(s)
    effects = _move_effects(s, x)
    names = sorted(effects)
    base_a = len(P.u1)
    base_b = len(P.v1 - P.movable_v)
    flex_u = len(P.u0) + len(P.movable_u)
    flex_v = len(P.v0) + len(P.movable_v)
    masks_u, masks_v = G.masks_u, G.masks_v
    natural_a = base_a + sum(1 for u in P.u0 if _affinity(masks_u, u, P.v1, P.v2) > 0)
    natural_b = base_b + len(P.movable_v) + sum(1 for v in P.v0 if _affinity(masks_v, v, P.u1, P.u2) > 0)

    # counts each star direction is guaranteed to supply by the counting bounds
    guaranteed = {
        'u1-v2': star_bounds(G, P.u1, P.v2, s, Side.U).f,
        'v2-u1': star_bounds(G, P.u1, P.v2, s, Side.U).g,
        'v1-u2': star_bounds(G, P.v1, P.u2, s, Side.V).f,
        'u2-v1': star_bounds(G, P.v1, P.u2, s, Side.V).g,
        'sqrt': Fraction(0),
    }

    split_u_options = [None] + (list(range(s + 1)) if len(P.u0) >= s else [])
    split_v_options = [None] + (list(range(s + 1)) if len(P.v0) >= s else [])
    plans: List[_Plan] = []
    for counts in product(range(s + 1), repeat=len(names)):
        if sum(counts) > 2 * s:
            continue
        for su, sv in product(split_u_options, split_v_options):
            da = sum(c * effects[name][0] for name, c in zip(names, counts))
            db = sum(c * effects[name][1] for name, c in zip(names, counts))
            fu, fv = flex_u, flex_v
            if su is not None:
                db -= su
                fu -= s
            if sv is not None:
                da -= sv
                fv -= s
            lo = max(base_a + da, base_b + db, 0)
            hi = min(base_a + da + fu, base_b + db + fv)
            first = -(-lo // s) * s
            if first > hi:
                continue
            options = range(first, hi + 1, s)
            natural = (natural_a + da + natural_b + db) / 2
            target = min(options, key=lambda value: (abs(value - natural), value))
            moves = tuple((name, c) for name, c in zip(names, counts) if c)
            unguaranteed = sum(1 for name, c in moves if guaranteed[name] < c)
            cost = (sum(counts) + (su is not None) + (sv is not None), unguaranteed,
                    abs(target - natural), moves, su if su is not None else -1, sv if sv is not None else -1)
            plans.append(_Plan(moves, su, sv, target, target - base_a - da, target - base_b - db, cost))
    plans.sort(key=lambda plan: plan.cost)
    return plans[:limit]


def _partners(masks, pool: Iterable[int], leaves: Iterable[int], need: int) -> Optional[Tuple[int, ...]]:
    """``need`` lowest-index vertices of ``pool`` adjacent to every leaf."""
    common = mask_of(pool)
    for leaf in leaves:
        common &= masks[leaf]
    chosen = list(bits(common))[:need]
    return tuple(chosen) if len(chosen) == need else None


class _Undecided(Exception):
    """A plan whose star systems could be neither found nor ruled out."""


def _undecided(systems: StarSystems) -> None:
    if systems.outcome is SystemOutcome.UNKNOWN:
        raise _Undecided(systems.reason)
    return None


def _realize(G: BalancedBigraph, P: BlockPartition, s: int, plan: _Plan) -> Optional[BlockPartition]:
    masks_u, masks_v = G.masks_u, G.masks_v
    u1 = set(P.u1)
    u2 = set(P.u2 - P.movable_u)
    v1 = set(P.v1 - P.movable_v)
    v2 = set(P.v2)
    u0, v0 = set(P.u0), set(P.v0)
    copies: List[KssCopy] = []

    if plan.split_u is not None:
        found = split_kss(G, sorted(u0), sorted(v1), sorted(v2), s, plan.split_u).copy
        if found is None:
            return None
        copies.append(found)
        u0 -= set(found.us)
        v1 -= set(found.vs)
        v2 -= set(found.vs)
    if plan.split_v is not None:
        found = split_kss(G, sorted(v0), sorted(u1), sorted(u2), s, plan.split_v, side=Side.V).copy
        if found is None:
            return None
        copies.append(found)
        v0 -= set(found.vs)
        u1 -= set(found.us)
        u2 -= set(found.us)

    counts = dict(plan.moves)
    pair_uv = bidirectional_star_systems(G, sorted(u1), sorted(v2), counts.get('u1-v2', 0), counts.get('v2-u1', 0), s, Side.U)
    if not pair_uv:
        return _undecided(pair_uv)
    pair_vu = bidirectional_star_systems(G, sorted(v1), sorted(u2), counts.get('v1-u2', 0), counts.get('u2-v1', 0), s, Side.V)
    if not pair_vu:
        return _undecided(pair_vu)
    stars_u1, stars_v2 = pair_uv
    stars_v1, stars_u2 = pair_vu
    for packing in (stars_u1, stars_v2, stars_v1, stars_u2):
        for star in packing.stars:
            if packing.center_side is Side.U:
                u1.discard(star.center)
                u2.discard(star.center)
                v1.difference_update(star.leaves)
                v2.difference_update(star.leaves)
            else:
                v1.discard(star.center)
                v2.discard(star.center)
                u1.difference_update(star.leaves)
                u2.difference_update(star.leaves)

    # complete each star with s-1 partners from the block opposite its leaves
    completions = (
        (stars_u1, masks_v, u2), (stars_u2, masks_v, u1),
        (stars_v1, masks_u, v2), (stars_v2, masks_u, v1),
    )
    for packing, leaf_masks, pool in completions:
        for star in packing.stars:
            partners = _partners(leaf_masks, sorted(pool), star.leaves, s - 1)
            if partners is None:
                return None
            pool.difference_update(partners)
            if packing.center_side is Side.U:
                copies.append(KssCopy((star.center,) + partners, star.leaves))
            else:
                copies.append(KssCopy(star.leaves, (star.center,) + partners))

    x = _sqrt_x(s)
    for _ in range(counts.get('sqrt', 0)):
        built = None
        for center in sorted(u1):
            into_2 = [v for v in sorted(v2) if v in G.adj_u[center]][:s - x]
            into_1 = [v for v in sorted(v1) if v in G.adj_u[center]][:x]
            if len(into_2) < s - x or len(into_1) < x:
                continue
            leaves = into_2 + into_1
            partners = _partners(masks_v, sorted(u2), leaves, s - 1)
            if partners is not None:
                built = KssCopy((center,) + partners, tuple(leaves))
                break
        if built is None:
            return None
        copies.append(built)
        u1.discard(built.us[0])
        u2.difference_update(built.us)
        v1.difference_update(built.vs)
        v2.difference_update(built.vs)

    # flexible vertices: highest side-1 affinity goes to side 1
    flex_u = sorted(u0 | P.movable_u, key=lambda u: (-_affinity(masks_u, u, P.v1, P.v2), u))
    flex_v = sorted(v0 | P.movable_v, key=lambda v: (-_affinity(masks_v, v, P.u1, P.u2), v))
    if plan.flex_u_side1 > len(flex_u) or plan.flex_v_side1 > len(flex_v):
        return None
    assign_u = [(u, 1 if i < plan.flex_u_side1 else 2) for i, u in enumerate(flex_u)]
    assign_v = [(v, 1 if i < plan.flex_v_side1 else 2) for i, v in enumerate(flex_v)]
    # movable vertices staying on their home side rejoin their block
    assign_u = [(u, side) for u, side in assign_u if not (u in P.movable_u and side == 2)]
    assign_v = [(v, side) for v, side in assign_v if not (v in P.movable_v and side == 1)]

    balanced = replace(
        P, reserved=P.reserved + tuple(copies),
        assign_u=tuple(assign_u), assign_v=tuple(assign_v),
    )
    a, b = balanced.side_one_counts()
    if a != b or a % s:
        return None
    return balanced


def balance_blocks(G: BalancedBigraph, P: BlockPartition, s: int, candidates: Optional[int] = None) -> BlockPartition:
    """
    Make the side-1 block pair square with size divisible by s.

    Move plans (star moves, splits of exceptional vertices, side choices
    for flexible vertices) are tried cheapest first; stars are committed as
    reserved copies.

    Raises:
        BalanceError: no plan among the candidates could be realised
    """
    limit = candidates if candidates is not None else get_search_config().balance_candidates
    plans = _plans(G, P, s, limit)
    undecided = 0
    for plan in plans:
        try:
            balanced = _realize(G, P, s, plan)
        except _Undecided as exc:
            logger.debug(f"balance_blocks: plan {plan.moves} undecided ({exc})")
            undecided += 1
            continue
        if balanced is not None:
            logger.debug(f"balance_blocks: plan {plan.moves} split=({plan.split_u}, {plan.split_v}) target={plan.target}")
            return balanced
    if undecided:
        raise BalanceError(f"none of {len(plans)} move plans balanced the blocks; "
                           f"{undecided} left undecided by the star search")
    raise BalanceError(f"none of {len(plans)} move plans balanced the blocks")


def _absorb_one(G: BalancedBigraph, x: int, side: Side, opposite_pool: set, same_pool: set,
                s: int) -> Optional[KssCopy]:
    """A copy through x using s vertices of ``opposite_pool`` and s−1 of ``same_pool``."""
    own_masks, other_masks = G.masks(side), G.masks(side.other)
    same_mask = mask_of(same_pool)
    candidates = sorted(
        (y for y in bits(own_masks[x] & mask_of(opposite_pool))),
        key=lambda y: (-popcount(other_masks[y] & same_mask), y),
    )
    chosen: List[int] = []

    def search(start: int, common: int) -> Optional[Tuple[int, ...]]:
        if len(chosen) == s:
            partners = list(bits(common))[:s - 1]
            return tuple(partners)
        for i in range(start, len(candidates) - (s - len(chosen)) + 1):
            narrowed = common & other_masks[candidates[i]]
            if popcount(narrowed) < s - 1:
                continue
            chosen.append(candidates[i])
            found = search(i + 1, narrowed)
            if found is not None:
                return found
            chosen.pop()
        return None

    partners = search(0, same_mask)
    if partners is None:
        return None
    if side is Side.U:
        return KssCopy((x,) + partners, tuple(chosen))
    return KssCopy(tuple(chosen), (x,) + partners)


def absorb_exceptional(G: BalancedBigraph, P: BlockPartition, s: int) -> BlockPartition:
    """
    Give every pending flexible vertex a private copy inside its assigned side.

    Raises:
        AbsorptionError: some vertex has no such copy left
    """
    if not P.assign_u and not P.assign_v:
        return P
    pending_u = {u for u, _ in P.assign_u}
    pending_v = {v for v, _ in P.assign_v}
    u1, v1, u2, v2 = (set(block) for block in P.residual())
    u_pools = {1: u1 - pending_u, 2: u2 - pending_u}
    v_pools = {1: v1 - pending_v, 2: v2 - pending_v}
    masks_u, masks_v = G.masks_u, G.masks_v

    work = [(Side.U, x, side) for x, side in P.assign_u] + [(Side.V, y, side) for y, side in P.assign_v]
    work.sort(key=lambda item: (
        popcount(G.masks(item[0])[item[1]] & mask_of((v_pools if item[0] is Side.U else u_pools)[item[2]])),
        item[0].value, item[1],
    ))
    copies: List[KssCopy] = []
    for vertex_side, x, side in work:
        if vertex_side is Side.U:
            copy = _absorb_one(G, x, Side.U, v_pools[side], u_pools[side], s)
        else:
            copy = _absorb_one(G, x, Side.V, u_pools[side], v_pools[side], s)
        if copy is None:
            raise AbsorptionError(f"{vertex_side.value}{x} has no private copy in side {side}")
        copies.append(copy)
        u_pools[side].difference_update(copy.us)
        v_pools[side].difference_update(copy.vs)
    return replace(P, reserved=P.reserved + tuple(copies), assign_u=(), assign_v=())


def tile_dense_block(G: BalancedBigraph, A: Iterable[int], B: Iterable[int], s: int,
                     budget: Optional[int] = None) -> Tiling:
    """
    Tile the near-complete block G[A, B].

    Greedy placement first; whatever is left is handed to the exact search,
    releasing more and more greedy copies back into it, and finally the
    whole block.

    Raises:
        BlockTilingError: the block is not dense enough or no tiling was found
    """
    A, B = set(A), set(B)
    if len(A) != len(B):
        raise BlockTilingError(f"block is not square: {len(A)} x {len(B)}")
    H, u_labels, v_labels = G.induced(A, B)
    size = H.n
    if size % s:
        raise BlockTilingError(f"block of size {size} not divisible by s={s}")
    if size == 0:
        return Tiling(s, ())
    slack = size // 4
    worst = min(min(popcount(m) for m in H.masks_u), min(popcount(m) for m in H.masks_v))
    if worst < size - slack:
        raise BlockTilingError(f"block minimum degree {worst} below {size - slack}")

    greedy = greedy_tile(H, s)
    if greedy.complete:
        return greedy.tiling.relabel(u_labels, v_labels)

    copies = list(greedy.tiling.copies)
    for release in (0, 2, 4, 8):
        if release > len(copies):
            break
        kept = copies[:len(copies) - release]
        freed = copies[len(copies) - release:]
        rest_u = list(greedy.remainder_u) + [u for c in freed for u in c.us]
        rest_v = list(greedy.remainder_v) + [v for c in freed for v in c.vs]
        R, ru, rv = H.induced(rest_u, rest_v)
        result = exact_tile(R, s, budget)
        if result.tiled:
            inner = Tiling(s, tuple(kept)).merged(result.tiling.relabel(ru, rv))
            return inner.relabel(u_labels, v_labels)
    result = exact_tile(H, s, budget)
    if result.tiled:
        return result.tiling.relabel(u_labels, v_labels)
    raise BlockTilingError(f"no tiling of a {size}x{size} block found ({result.verdict.value})")


def _stitch(G: BalancedBigraph, P: BlockPartition, s: int, budget: Optional[int]) -> Tiling:
    u1, v1, u2, v2 = P.residual()
    ru, rv = P.reserved_u(), P.reserved_v()
    if len(ru) != s * len(P.reserved) or len(rv) != s * len(P.reserved):
        raise PipelineError("reserved copies overlap")
    if not (P.u0 <= ru and P.v0 <= rv):
        raise PipelineError("exceptional vertices left unabsorbed")
    if 2 * s * len(P.reserved) + len(u1) + len(v1) + len(u2) + len(v2) != 2 * G.n:
        raise PipelineError("reserved and residual vertices do not account for the graph")
    first = tile_dense_block(G, u1, v1, s, budget)
    second = tile_dense_block(G, u2, v2, s, budget)
    return Tiling(s, P.reserved).merged(first, second)


def _fallback(G: BalancedBigraph, s: int, budget: Optional[int], reason: str,
              trace: List[StageTrace], transposed: bool) -> PipelineResult:
    logger.info(f"extremal_tile: falling back to exact search ({reason})")
    result: TileResult = exact_tile(G, s, budget)
    trace.append(StageTrace('fallback', f"{reason}; exact search {result.verdict.value} after {result.nodes} nodes"))
    tiling = result.tiling
    if tiling is not None and transposed:
        tiling = tiling.transposed()
    return PipelineResult(result.verdict, tiling, result.nodes, True, reason, trace)


def extremal_tile(G: BalancedBigraph, s: int, alpha=None, budget: Optional[int] = None) -> PipelineResult:
    """
    Tile G through the extremal pipeline, falling back to exact_tile on any stage failure.

    Args:
        G: the graph
        s: tile size
        alpha: density bound for detection (default from config)
        budget: node budget for every exact search

    Returns:
        PipelineResult with the verdict, the tiling if any, and a stage trace
    """
    if s < 1:
        raise InvalidParameterError(f"tile size must be positive, got {s}")
    alpha = parse_alpha(alpha if alpha is not None else get_search_config().alpha)
    trace: List[StageTrace] = []
    if G.n % s:
        return _fallback(G, s, budget, f"s={s} does not divide n={G.n}", trace, False)

    profile = min_degrees(G, s)
    transposed = profile.delta_v < profile.delta_u
    H = G.transposed() if transposed else G
    trace.append(StageTrace('orient', f"δ_U={profile.delta_u} δ_V={profile.delta_v} transposed={transposed}"))

    found = detect_extremal(H, s, alpha)
    if found is None:
        trace.append(StageTrace('detect', 'no sparse pair'))
        return _fallback(H, s, budget, 'not extremal', trace, transposed)
    U1p, V2p = found
    trace.append(StageTrace('detect', f"|U1'|={len(U1p)} |V2'|={len(V2p)} density={float(density(H, U1p, V2p)):.4f}"))

    try:
        P = preprocess(H, s, U1p, V2p, alpha)
        trace.append(StageTrace('preprocess', f"blocks {P.sizes()}"))
        P = classify_movable(H, P, s)
        trace.append(StageTrace('classify', f"movable U={len(P.movable_u)} V={len(P.movable_v)}"))
        a, b = len(P.u1), len(P.v1)
        P = balance_blocks(H, P, s)
        trace.append(StageTrace('balance', f"discrepancy |U1|-|V1|={a - b}; reserved {len(P.reserved)} copies"))
        P = absorb_exceptional(H, P, s)
        trace.append(StageTrace('absorb', f"reserved {len(P.reserved)} copies"))
        tiling = _stitch(H, P, s, budget)
        trace.append(StageTrace('tile-blocks', f"{len(tiling)} copies in total"))
    except PipelineError as exc:
        trace.append(StageTrace(exc.stage, f"failed: {exc}"))
        return _fallback(H, s, budget, f"{exc.stage}: {exc}", trace, transposed)

    check = verify_tiling(H, tiling)
    if not check:
        logger.error(f"extremal_tile: stitched tiling failed verification: {check.violation}")
        return _fallback(H, s, budget, f"stitched tiling invalid: {check.violation}", trace, transposed)
    for entry in trace:
        logger.info(f"pipeline {entry.line()}")
    if transposed:
        tiling = tiling.transposed()
    return PipelineResult(Verdict.TILED, tiling, 0, False, None, trace)
