"""
Degree-sum thresholds for K_{s,s}-tilings.

All arithmetic is integral; ⌈√s⌉ comes from math.isqrt so it is exact
for every s.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

from tiling.exceptions import ThresholdRangeError
from .bigraph import BalancedBigraph, min_degrees


class ThresholdKind(str, Enum):
    HALL = 'hall'
    ZHAO = 'zhao'
    MAIN1 = 'main1'
    MAIN2 = 'main2'


def ceil_sqrt(s: int) -> int:
    if s < 0:
        raise ThresholdRangeError(f"ceil_sqrt needs s >= 0, got {s}")
    root = math.isqrt(s)
    return root if root * root == s else root + 1


def square_split(s: int) -> Tuple[int, int]:
    """Unique (p, q) with s = p² + q and 0 ≤ q ≤ 2p."""
    p = math.isqrt(s)
    return p, s - p * p


def c_of_s(s: int) -> int:
    """
    The {0,1} correction term: 0 if q = 0 or p+1 ≤ q ≤ 2p, 1 if 1 ≤ q ≤ p.
    """
    if s < 1:
        raise ThresholdRangeError(f"c(s) needs s >= 1, got {s}")
    p, q = square_split(s)
    return 1 if 1 <= q <= p else 0


def main2_d_range(s: int) -> range:
    """Admissible d for the √s threshold: 0 ≤ d ≤ s − 2⌈√s⌉ + c(s) + 1."""
    return range(0, s - 2 * ceil_sqrt(s) + c_of_s(s) + 2)


def threshold(s: int, m: int, kind, d: Optional[int] = None) -> int:
    """
    Degree threshold for balanced bipartite graphs with n = m·s.

    Args:
        s: tile size
        m: number of tiles, so n = m·s
        kind: one of hall, zhao, main1, main2
        d: offset for main2

    Returns:
        the threshold value (a bound on δ_U+δ_V, or on δ(G) for zhao)
    """
    kind = ThresholdKind(kind)
    if m < 1:
        raise ThresholdRangeError(f"m must be positive, got {m}")
    n = m * s
    if kind is ThresholdKind.HALL:
        if s != 1:
            raise ThresholdRangeError("the matching threshold applies to s = 1 only")
        return n
    if s < 2:
        raise ThresholdRangeError(f"{kind.value} threshold needs s >= 2, got {s}")
    if kind is ThresholdKind.ZHAO:
        if m % 2 == 0:
            return n // 2 + s - 1
        return (n + 3 * s) // 2 - 2
    if kind is ThresholdKind.MAIN1:
        return n + 3 * s - 5
    if d is None:
        d = 0
    if d not in main2_d_range(s):
        allowed = main2_d_range(s)
        raise ThresholdRangeError(
            f"d={d} outside 0..{allowed.stop - 1} for s={s}"
        )
    return n + 2 * s - 2 * ceil_sqrt(s) + d + c_of_s(s)


@dataclass(frozen=True)
class TheoremCheck:
    name: str
    applies: bool
    detail: str


def theorem_report(G: BalancedBigraph, s: int, lam=None) -> List[TheoremCheck]:
    """
    Which sufficient degree conditions G meets for a K_{s,s}-tiling.

    ``lam`` is the user-supplied λ for the conditions that need
    δ_V ≥ δ_U ≥ λn; without it those checks only report the degree sum.
    """
    profile = min_degrees(G, s)
    n = G.n
    checks: List[TheoremCheck] = []
    if n % s:
        return [TheoremCheck('divisibility', False, f"s={s} does not divide n={n}")]
    m = n // s
    total = profile.delta_sum

    if s == 1:
        bound = threshold(1, m, ThresholdKind.HALL)
        checks.append(TheoremCheck('matching', total >= bound, f"δ_U+δ_V = {total} vs {bound}"))
        return checks

    zhao = threshold(s, m, ThresholdKind.ZHAO)
    delta = min(profile.delta_u, profile.delta_v)
    checks.append(TheoremCheck('min-degree', delta >= zhao, f"δ(G) = {delta} vs {zhao}"))

    oriented = profile.delta_v >= profile.delta_u
    lam_ok = None
    if lam is not None:
        lam_ok = profile.delta_u >= lam * n
    lam_note = 'λ unchecked' if lam_ok is None else f"δ_U ≥ λn: {lam_ok}"

    main1 = threshold(s, m, ThresholdKind.MAIN1)
    checks.append(TheoremCheck(
        'degree-sum',
        total >= main1 and oriented and lam_ok is not False,
        f"δ_U+δ_V = {total} vs {main1}; δ_V ≥ δ_U: {oriented}; {lam_note}",
    ))

    for d in main2_d_range(s):
        bound = threshold(s, m, ThresholdKind.MAIN2, d)
        k_ok = profile.decomposed and profile.k2 >= (s - d) * profile.k1
        checks.append(TheoremCheck(
            f"sqrt-degree-sum d={d}",
            total >= bound and oriented and bool(k_ok) and lam_ok is not False,
            f"δ_U+δ_V = {total} vs {bound}; k2 ≥ (s−d)k1: {bool(k_ok)}; {lam_note}",
        ))
    return checks
