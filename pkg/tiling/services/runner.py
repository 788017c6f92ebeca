"""
Entry points shared by the management commands, the REST views and the scan harness.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

from tiling.exceptions import CertificateError, InvalidParameterError
from tiling.utils.bigraph import BalancedBigraph, Tiling, verify_tiling
from tiling.utils.textio import certificate_kind, read_tiling
from .pipeline import extremal_tile
from .refuter import read_refutation, verify_refutation
from .tiler import Verdict, exact_tile, greedy_tile

logger = logging.getLogger(__name__)

MODES = ('exact', 'pipeline', 'greedy')


@dataclass
class SolveOutcome:
    verdict: Verdict
    tiling: Optional[Tiling] = None
    nodes: int = 0
    fallback: bool = False
    trace: List[str] = field(default_factory=list)


def solve(G: BalancedBigraph, s: int, mode: str = 'exact', budget: Optional[int] = None,
          alpha=None) -> SolveOutcome:
    """
    Run one tiler and re-verify any tiling it returns.

    A greedy run that leaves a remainder reports unknown, since greedy
    failure proves nothing.
    """
    if mode not in MODES:
        raise InvalidParameterError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    if mode == 'exact':
        result = exact_tile(G, s, budget)
        outcome = SolveOutcome(result.verdict, result.tiling, result.nodes)
    elif mode == 'pipeline':
        result = extremal_tile(G, s, alpha, budget)
        outcome = SolveOutcome(result.verdict, result.tiling, result.nodes, result.fallback, result.trace_lines())
    else:
        greedy = greedy_tile(G, s)
        verdict = Verdict.TILED if greedy.complete else Verdict.UNKNOWN
        outcome = SolveOutcome(verdict, greedy.tiling if greedy.complete else None)

    if outcome.tiling is not None:
        check = verify_tiling(G, outcome.tiling)
        if not check:
            raise CertificateError(f"{mode} tiler produced an invalid tiling: {check.violation}")
    logger.info(f"solve: mode={mode} n={G.n} s={s} verdict={outcome.verdict.value} nodes={outcome.nodes}")
    return outcome


@dataclass
class CertificateReport:
    kind: str
    ok: bool
    violation: Optional[str] = None


def check_certificate(G: BalancedBigraph, text: str) -> CertificateReport:
    """
    Verify a tiling or refutation certificate against G.

    Raises:
        GraphFormatError: the certificate does not parse
    """
    kind = certificate_kind(text)
    if kind == 'tiling':
        n, tiling = read_tiling(text)
        if n != G.n:
            return CertificateReport(kind, False, f"certificate is for n={n}, graph has n={G.n}")
        check = verify_tiling(G, tiling)
        return CertificateReport(kind, check.ok, check.violation)
    if kind == 'refutation':
        check = verify_refutation(G, read_refutation(text))
        return CertificateReport(kind, check.ok, check.violation)
    return CertificateReport(kind, False, f"unknown certificate kind {kind!r}")
