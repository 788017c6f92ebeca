"""
Parameter sweeps over generator families.

A grid spec is JSON:

    {"label": "unbalanced sweep",
     "rows": [{"family": "unbalanced_even",
               "params": {"s": 2, "k": 13, "j": [1, 2]},
               "refute": true, "tiler": "exact", "budget": 100000}]}

List-valued params expand to their product. Every instance becomes one
ScanResult; rows come back in grid order whatever the worker count.
"""

import csv
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from itertools import product
from typing import Dict, Iterable, List, Optional

from tiling.exceptions import InvalidParameterError, TilingError
from tiling.utils.bigraph import min_degrees
from .constructions import build, canonical_family
from .refuter import Refutation, refute_by_crossing, verify_refutation
from .runner import solve

logger = logging.getLogger(__name__)

TILERS = ('exact', 'pipeline', 'greedy', 'none')
VERDICTS = ('tiled', 'absent', 'refuted', 'unknown', 'error')
COLUMNS = (
    'family', 's', 'n', 'params', 'delta_u', 'delta_v', 'delta_sum', 'delta_gap',
    'verdict', 'nodes_explored', 'wall_time', 'note',
)


@dataclass
class ScanResult:
    family: str
    s: int
    n: int
    params: str
    delta_u: Optional[int]
    delta_v: Optional[int]
    delta_sum: Optional[int]
    delta_gap: Optional[int]
    verdict: str
    nodes_explored: int = 0
    wall_time: float = 0.0
    note: str = ''

    def as_row(self) -> List[object]:
        values = asdict(self)
        values['wall_time'] = f"{self.wall_time:.4f}"
        return ['' if values[column] is None else values[column] for column in COLUMNS]


def expand_grid(spec: Dict) -> List[Dict]:
    """Flatten a grid spec into one task dict per instance, in grid order."""
    tasks: List[Dict] = []
    for entry in spec.get('rows', []):
        family = canonical_family(entry['family'])
        params = entry.get('params', {})
        tiler = entry.get('tiler', 'exact')
        if tiler not in TILERS:
            raise InvalidParameterError(f"unknown tiler {tiler!r}; expected one of {', '.join(TILERS)}")
        keys = sorted(params)
        choices = [params[key] if isinstance(params[key], list) else [params[key]] for key in keys]
        for values in product(*choices):
            tasks.append({
                'family': family,
                'params': dict(zip(keys, values)),
                'refute': bool(entry.get('refute', False)),
                'tiler': tiler,
                'budget': entry.get('budget'),
                'alpha': entry.get('alpha'),
            })
    return tasks


def _params_text(params: Dict) -> str:
    return json.dumps(params, sort_keys=True, separators=(',', ':'))


def run_task(task: Dict) -> ScanResult:
    """Build one instance and decide it; failures are recorded, never raised."""
    started = time.perf_counter()
    family, params = task['family'], task['params']
    s_hint = params.get('s', 1)
    try:
        construction = build(family, **params)
    except TilingError as exc:
        logger.warning(f"scan row {family} {params} failed: {exc}")
        return ScanResult(family, s_hint, params.get('n', 0), _params_text(params), None, None, None, None,
                          'error', wall_time=time.perf_counter() - started, note=str(exc))

    G, s = construction.graph, construction.s
    profile = min_degrees(G, s)
    row = ScanResult(
        family, s, G.n, _params_text(params),
        profile.delta_u, profile.delta_v, profile.delta_sum, profile.delta_gap, 'unknown',
    )
    try:
        if task.get('refute') and construction.blocks is not None and G.n % s == 0:
            outcome = refute_by_crossing(G, construction.blocks, s)
            if isinstance(outcome, Refutation):
                check = verify_refutation(G, outcome)
                row.verdict = 'refuted' if check.ok else 'error'
                row.note = '' if check.ok else f"refutation failed re-check: {check.violation}"
                row.wall_time = time.perf_counter() - started
                return row

        tiler = task.get('tiler', 'exact')
        if tiler != 'none':
            outcome = solve(G, s, tiler, task.get('budget'), task.get('alpha'))
            row.verdict, row.nodes_explored = outcome.verdict.value, outcome.nodes
            if tiler == 'pipeline':
                row.note = 'fallback' if outcome.fallback else 'pipeline'
    except TilingError as exc:
        logger.warning(f"scan row {family} {params} failed: {exc}")
        row.verdict, row.note = 'error', str(exc)
    row.wall_time = time.perf_counter() - started
    return row


def run_scan(spec: Dict, workers: int = 1) -> List[ScanResult]:
    tasks = expand_grid(spec)
    logger.info(f"scan {spec.get('label', '')!r}: {len(tasks)} instances on {workers} worker(s)")
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_task, tasks))
    return [run_task(task) for task in tasks]


def write_rows(rows: Iterable[ScanResult], path: str, overwrite: bool = False) -> None:
    """Append rows to a CSV file, writing the header when the file is new or empty."""
    fresh = overwrite or not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, 'w' if overwrite else 'a', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle)
        if fresh:
            writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow(row.as_row())
