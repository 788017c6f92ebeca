"""
Non-tileability certificates from block profiles of K_{s,s} copies.

Given blocks U = U1 ∪ U2 and V = V1 ∪ V2, every copy in a tiling has a
profile (x1, x2, y1, y2): how many of its vertices lie in U1, U2, V1, V2.
If no nonnegative combination of the profiles that actually embed in G
adds up to (|U1|, |V1|, n/s), G has no tiling.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Tuple, Union

from tiling.exceptions import BlockPartitionError, GraphFormatError, InvalidParameterError
from tiling.utils.bigraph import BalancedBigraph, BlockSpec, KssCopy, bits, mask_of, popcount
from tiling.utils.textio import BLOCK_NAMES, block_spec_from, format_ranges, parse_block_assignments

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class CrossingSignature:
    x1: int
    x2: int
    y1: int
    y2: int

    @property
    def crossing(self) -> bool:
        """Touches both U1∪V1 and U2∪V2."""
        return self.x1 + self.y1 > 0 and self.x2 + self.y2 > 0

    def label(self) -> str:
        return f"({self.x1},{self.x2},{self.y1},{self.y2})"


def all_signatures(s: int) -> List[CrossingSignature]:
    return [CrossingSignature(x1, s - x1, y1, s - y1) for x1 in range(s + 1) for y1 in range(s + 1)]


@dataclass(frozen=True)
class TransferTarget:
    u1: int
    v1: int
    copies: int


@dataclass
class Refutation:
    n: int
    s: int
    blocks: BlockSpec
    realizable: Tuple[CrossingSignature, ...]
    target: TransferTarget
    witnesses: Dict[CrossingSignature, KssCopy] = field(default_factory=dict, compare=False)

    refuted = True

    def system_lines(self) -> List[str]:
        terms = self.realizable

        def row(coefficient, value, label):
            parts = [f"{coefficient(sig)}*n{sig.label()}" for sig in terms if coefficient(sig)]
            return f"{' + '.join(parts) or '0'} = {value}   ({label})"

        return [
            row(lambda sig: sig.x1, self.target.u1, 'U1'),
            row(lambda sig: sig.y1, self.target.v1, 'V1'),
            row(lambda sig: 1, self.target.copies, 'copies'),
        ]

    def to_text(self) -> str:
        lines = [f"refutation {self.n} {self.s}"]
        for name, members in self.blocks.as_dict().items():
            lines.append(f"block {name}={format_ranges(members)}")
        lines.append(f"target U1={self.target.u1} V1={self.target.v1} copies={self.target.copies}")
        for sig in self.realizable:
            lines.append(f"sig {sig.x1} {sig.x2} {sig.y1} {sig.y2}")
        lines.append("# no nonnegative integers n(x1,x2,y1,y2) satisfy:")
        lines.extend(f"#   {line}" for line in self.system_lines())
        return '\n'.join(lines) + '\n'


@dataclass
class Inconclusive:
    s: int
    realizable: Tuple[CrossingSignature, ...]
    target: TransferTarget
    witness: Tuple[Tuple[CrossingSignature, int], ...]

    refuted = False

    def describe(self) -> str:
        counts = ', '.join(f"{count}×{sig.label()}" for sig, count in self.witness)
        return f"profile system is feasible: {counts}"


def signature_witness(G: BalancedBigraph, blocks: BlockSpec, sig: CrossingSignature) -> Optional[KssCopy]:
    """
    A K_{s,s} in G with exactly the given block profile, or None.

    X1 ⊆ U1 and X2 ⊆ U2 are chosen vertex by vertex while the common
    neighbourhood still holds y1 vertices of V1 and y2 of V2.
    """
    masks_u = G.masks_u
    v1_mask, v2_mask = mask_of(blocks.v1), mask_of(blocks.v2)
    u1, u2 = sorted(blocks.u1), sorted(blocks.u2)
    chosen: List[int] = []

    def pick(pool: List[int], count: int, start: int, common: int, then) -> Optional[KssCopy]:
        if count == 0:
            return then(common)
        for i in range(start, len(pool) - count + 1):
            narrowed = common & masks_u[pool[i]]
            if popcount(narrowed & v1_mask) < sig.y1 or popcount(narrowed & v2_mask) < sig.y2:
                continue
            chosen.append(pool[i])
            found = pick(pool, count - 1, i + 1, narrowed, then)
            if found is not None:
                return found
            chosen.pop()
        return None

    def finish(common: int) -> KssCopy:
        vs = list(bits(common & v1_mask))[:sig.y1] + list(bits(common & v2_mask))[:sig.y2]
        return KssCopy(tuple(chosen), tuple(vs))

    everything = G.full_mask
    if popcount(v1_mask) < sig.y1 or popcount(v2_mask) < sig.y2:
        return None
    return pick(u1, sig.x1, 0, everything, lambda common: pick(u2, sig.x2, 0, common, finish))


def realizable_signatures(G: BalancedBigraph, blocks: BlockSpec, s: int) -> Dict[CrossingSignature, KssCopy]:
    found = {}
    for sig in all_signatures(s):
        witness = signature_witness(G, blocks, sig)
        if witness is not None:
            found[sig] = witness
    return found


def solve_profile_system(signatures: Iterable[CrossingSignature], target: TransferTarget) -> Optional[Dict[CrossingSignature, int]]:
    """
    Nonnegative integer counts n_σ with Σ n_σ x1 = u1, Σ n_σ y1 = v1, Σ n_σ = copies.

    Layered reachability over (Σx1, Σy1) pairs, one layer per copy; each
    layer is a Python int used as a bitset indexed by Σx1·(v1+1) + Σy1.

    Returns:
        the counts, or None when the system has no solution
    """
    signatures = sorted(set(signatures))
    A, B, M = target.u1, target.v1, target.copies
    if min(A, B, M) < 0:
        return None
    width = B + 1
    size = (A + 1) * width
    full = (1 << size) - 1
    # column masks: positions whose Σy1 leaves room for y more
    columns = {}
    for sig in signatures:
        if sig.y1 not in columns:
            row = (1 << max(0, width - sig.y1)) - 1 if sig.y1 <= B else 0
            mask = 0
            for a in range(A + 1):
                mask |= row << (a * width)
            columns[sig.y1] = mask
    usable = [sig for sig in signatures if sig.x1 <= A and sig.y1 <= B]

    layers = [1]
    for _ in range(M):
        current = layers[-1]
        reached = 0
        for sig in usable:
            reached |= (current & columns[sig.y1]) << (sig.x1 * width + sig.y1)
        layers.append(reached & full)
    goal = A * width + B
    if not layers[M] >> goal & 1:
        return None

    counts: Dict[CrossingSignature, int] = {}
    position = goal
    for layer in range(M, 0, -1):
        for sig in usable:
            shift = sig.x1 * width + sig.y1
            previous = position - shift
            if previous < 0 or (position % width) < sig.y1:
                continue
            if layers[layer - 1] >> previous & 1:
                counts[sig] = counts.get(sig, 0) + 1
                position = previous
                break
    return counts


def _check_inputs(G: BalancedBigraph, blocks: BlockSpec, s: int) -> TransferTarget:
    if s < 1:
        raise InvalidParameterError(f"tile size must be positive, got {s}")
    blocks.validate(G.n)
    if G.n % s:
        raise InvalidParameterError(f"s={s} does not divide n={G.n}")
    return TransferTarget(len(blocks.u1), len(blocks.v1), G.n // s)


def refute_by_crossing(G: BalancedBigraph, blocks: BlockSpec, s: int) -> Union[Refutation, Inconclusive]:
    """
    Try to certify that G has no K_{s,s}-tiling from the block profiles.

    Raises:
        BlockPartitionError: the blocks do not partition U and V
        InvalidParameterError: s < 1 or s does not divide n
    """
    target = _check_inputs(G, blocks, s)
    witnesses = realizable_signatures(G, blocks, s)
    realizable = tuple(sorted(witnesses))
    solution = solve_profile_system(realizable, target)
    if solution is None:
        logger.info(f"refute_by_crossing: refuted with {len(realizable)} realizable profiles (n={G.n}, s={s})")
        return Refutation(G.n, s, blocks, realizable, target, witnesses)
    witness = tuple(sorted(solution.items()))
    logger.info(f"refute_by_crossing: inconclusive (n={G.n}, s={s})")
    return Inconclusive(s, realizable, target, witness)


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    violation: Optional[str] = None

    def __bool__(self):
        return self.ok


def verify_refutation(G: BalancedBigraph, ref: Refutation) -> CertificateCheck:
    """Re-derive a refutation from G alone and compare."""
    try:
        expected = _check_inputs(G, ref.blocks, ref.s)
    except (BlockPartitionError, InvalidParameterError) as exc:
        return CertificateCheck(False, str(exc))
    if ref.n != G.n:
        return CertificateCheck(False, f"certificate is for n={ref.n}, graph has n={G.n}")
    for sig in ref.realizable:
        if sig.x1 + sig.x2 != ref.s or sig.y1 + sig.y2 != ref.s or min(sig.x1, sig.x2, sig.y1, sig.y2) < 0:
            return CertificateCheck(False, f"profile {sig.label()} does not sum to s={ref.s}")
    solution = solve_profile_system(ref.realizable, ref.target)
    if solution is not None:
        counts = ', '.join(f"{count}×{sig.label()}" for sig, count in sorted(solution.items()))
        return CertificateCheck(False, f"stated system is feasible: {counts}")
    if ref.target != expected:
        return CertificateCheck(
            False,
            f"target (U1={ref.target.u1}, V1={ref.target.v1}, copies={ref.target.copies}) "
            f"does not match the blocks (U1={expected.u1}, V1={expected.v1}, copies={expected.copies})",
        )
    listed = set(ref.realizable)
    for sig in all_signatures(ref.s):
        if sig not in listed and signature_witness(G, ref.blocks, sig) is not None:
            return CertificateCheck(False, f"profile {sig.label()} embeds in G but is not listed")
    return CertificateCheck(True)


def read_refutation(text: str) -> Refutation:
    lines = [
        (number, line.strip())
        for number, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.strip().startswith('#')
    ]
    if not lines or lines[0][1].split()[0] != 'refutation':
        raise GraphFormatError("expected 'refutation <n> <s>' header")
    number, header = lines[0]
    parts = header.split()
    if len(parts) != 3:
        raise GraphFormatError("header must be 'refutation <n> <s>'", number)
    try:
        n, s = int(parts[1]), int(parts[2])
    except ValueError:
        raise GraphFormatError("header values must be integers", number)

    block_items: List[str] = []
    target = None
    signatures: List[CrossingSignature] = []
    for number, line in lines[1:]:
        keyword, _, rest = line.partition(' ')
        if keyword == 'block':
            block_items.append(rest.strip())
        elif keyword == 'target':
            fields = dict(item.split('=', 1) for item in rest.split() if '=' in item)
            try:
                target = TransferTarget(int(fields['U1']), int(fields['V1']), int(fields['copies']))
            except (KeyError, ValueError):
                raise GraphFormatError(f"malformed target line {line!r}", number)
        elif keyword == 'sig':
            try:
                values = [int(x) for x in rest.split()]
            except ValueError:
                raise GraphFormatError(f"non-integer profile in {line!r}", number)
            if len(values) != 4:
                raise GraphFormatError(f"profile needs four entries, found {line!r}", number)
            signatures.append(CrossingSignature(*values))
        else:
            raise GraphFormatError(f"unexpected line {line!r}", number)
    blocks = block_spec_from(parse_block_assignments(block_items))
    if blocks is None or target is None:
        raise GraphFormatError(f"refutation needs all of {', '.join(BLOCK_NAMES)} and a target line")
    return Refutation(n, s, blocks, tuple(signatures), target)
