"""
Plain-text formats for graphs and tilings.

Graph files:

    bigraph <n> <s>
    # family=zhao
    # block U1=0..6
    e <u> <v>

Tiling files:

    tiling <n> <s>
    c <u1> .. <us> | <v1> .. <vs>
"""

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from tiling.exceptions import GraphFormatError
from .bigraph import BalancedBigraph, BlockSpec, KssCopy, Tiling

BLOCK_RE = re.compile(r'^#\s*block\s+(U1|U2|V1|V2)\s*=\s*(\S*)\s*$')
META_RE = re.compile(r'^#\s*([A-Za-z_][\w.-]*)\s*=\s*(.*?)\s*$')
BLOCK_NAMES = ('U1', 'U2', 'V1', 'V2')


def format_ranges(indices: Iterable[int]) -> str:
    """Compress sorted indices into ``a..b`` runs, e.g. ``0..2,5,7..9``."""
    values = sorted(set(indices))
    runs = []
    start = prev = None
    for value in values:
        if start is None:
            start = prev = value
        elif value == prev + 1:
            prev = value
        else:
            runs.append((start, prev))
            start = prev = value
    if start is not None:
        runs.append((start, prev))
    return ','.join(str(a) if a == b else f"{a}..{b}" for a, b in runs)


def parse_ranges(text: str) -> List[int]:
    values: List[int] = []
    text = text.strip()
    if not text:
        return values
    for chunk in text.split(','):
        chunk = chunk.strip()
        if '..' in chunk:
            low, high = chunk.split('..', 1)
            low, high = int(low), int(high)
            if high < low:
                raise ValueError(f"descending range {chunk}")
            values.extend(range(low, high + 1))
        else:
            values.append(int(chunk))
    return values


def parse_block_assignments(items: Iterable[str]) -> Dict[str, List[int]]:
    """Parse ``U1=0..3`` style assignments (command line or metadata)."""
    blocks: Dict[str, List[int]] = {}
    for item in items:
        name, _, spec = item.partition('=')
        name = name.strip()
        if name not in BLOCK_NAMES:
            raise GraphFormatError(f"unknown block name {name!r}")
        try:
            blocks[name] = parse_ranges(spec)
        except ValueError as exc:
            raise GraphFormatError(f"bad range for {name}: {exc}") from exc
    return blocks


def block_spec_from(blocks: Dict[str, List[int]]) -> Optional[BlockSpec]:
    if not blocks:
        return None
    missing = [name for name in BLOCK_NAMES if name not in blocks]
    if missing:
        raise GraphFormatError(f"block spec lacks {', '.join(missing)}")
    return BlockSpec(blocks['U1'], blocks['U2'], blocks['V1'], blocks['V2'])


@dataclass
class ParsedGraph:
    graph: BalancedBigraph
    s: int
    metadata: Dict[str, str] = field(default_factory=dict)
    blocks: Optional[BlockSpec] = None


def _header(lines: List[Tuple[int, str]], keyword: str) -> Tuple[int, List[str]]:
    if not lines:
        raise GraphFormatError(f"missing '{keyword}' header")
    number, line = lines[0]
    parts = line.split()
    if parts[0] != keyword:
        raise GraphFormatError(f"expected '{keyword}' header, found {parts[0]!r}", number)
    return number, parts[1:]


def _content_lines(text: str) -> List[Tuple[int, str]]:
    return [
        (number, line.strip())
        for number, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.strip().startswith('#')
    ]


def read_graph(text: str) -> ParsedGraph:
    lines = _content_lines(text)
    number, args = _header(lines, 'bigraph')
    if len(args) != 2:
        raise GraphFormatError("header must be 'bigraph <n> <s>'", number)
    try:
        n, s = int(args[0]), int(args[1])
    except ValueError:
        raise GraphFormatError("header values must be integers", number)
    if n < 0 or s < 1:
        raise GraphFormatError(f"invalid header values n={n} s={s}", number)

    edges = []
    for number, line in lines[1:]:
        parts = line.split()
        if parts[0] != 'e' or len(parts) != 3:
            raise GraphFormatError(f"expected 'e <u> <v>', found {line!r}", number)
        try:
            u, v = int(parts[1]), int(parts[2])
        except ValueError:
            raise GraphFormatError(f"non-integer endpoint in {line!r}", number)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"edge ({u}, {v}) out of range for n={n}", number)
        edges.append((u, v))

    metadata: Dict[str, str] = {}
    block_items: List[str] = []
    for line in text.splitlines():
        line = line.strip()
        match = BLOCK_RE.match(line)
        if match:
            block_items.append(f"{match.group(1)}={match.group(2)}")
            continue
        match = META_RE.match(line)
        if match:
            metadata[match.group(1)] = match.group(2)

    blocks = block_spec_from(parse_block_assignments(block_items))
    if blocks is not None:
        blocks.validate(n)
    return ParsedGraph(BalancedBigraph.from_edges(n, edges), s, metadata, blocks)


def write_graph(G: BalancedBigraph, s: int, metadata: Optional[Dict[str, object]] = None,
                blocks: Optional[BlockSpec] = None) -> str:
    lines = [f"bigraph {G.n} {s}"]
    for key, value in (metadata or {}).items():
        lines.append(f"# {key}={value}")
    if blocks is not None:
        for name, members in blocks.as_dict().items():
            lines.append(f"# block {name}={format_ranges(members)}")
    lines.extend(f"e {u} {v}" for u, v in G.edges())
    return '\n'.join(lines) + '\n'


def write_tiling(T: Tiling, n: int) -> str:
    lines = [f"tiling {n} {T.s}"]
    for copy in T.copies:
        lines.append(f"c {' '.join(map(str, copy.us))} | {' '.join(map(str, copy.vs))}")
    return '\n'.join(lines) + '\n'


def read_tiling(text: str) -> Tuple[int, Tiling]:
    lines = _content_lines(text)
    number, args = _header(lines, 'tiling')
    if len(args) != 2:
        raise GraphFormatError("header must be 'tiling <n> <s>'", number)
    n, s = int(args[0]), int(args[1])
    copies = []
    for number, line in lines[1:]:
        if not line.startswith('c ') or '|' not in line:
            raise GraphFormatError(f"expected 'c <us> | <vs>', found {line!r}", number)
        left, right = line[2:].split('|', 1)
        try:
            us = tuple(int(x) for x in left.split())
            vs = tuple(int(x) for x in right.split())
        except ValueError:
            raise GraphFormatError(f"non-integer vertex in {line!r}", number)
        copies.append(KssCopy(us, vs))
    return n, Tiling(s, tuple(copies))


def certificate_kind(text: str) -> str:
    """First keyword of a certificate file: ``tiling`` or ``refutation``."""
    lines = _content_lines(text)
    if not lines:
        raise GraphFormatError("empty certificate")
    return lines[0][1].split()[0]
