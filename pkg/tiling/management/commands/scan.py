import json

from django.core.management.base import BaseCommand, CommandError

from tiling.exceptions import TilingError
from tiling.models import ScanRow
from tiling.services.scan import run_scan, write_rows
from ._common import EXIT_ERROR, fail, read_text


class Command(BaseCommand):
    help = "Sweep a parameter grid and append one CSV row per instance."

    def add_arguments(self, parser):
        parser.add_argument('grid', help="Grid spec (JSON)")
        parser.add_argument('out', help="CSV file; rows are appended")
        parser.add_argument('--overwrite', action='store_true', help="Replace the CSV instead of appending")
        parser.add_argument('--workers', type=int, default=1)
        parser.add_argument('--save', action='store_true', help="Also store rows in the database")
        parser.add_argument('--label', default=None, help="Label for saved rows; defaults to the grid's label")

    def handle(self, *args, **options):
        try:
            spec = json.loads(read_text(options['grid']))
        except json.JSONDecodeError as exc:
            raise CommandError(f"{options['grid']}: invalid JSON: {exc}", returncode=EXIT_ERROR)
        if options['workers'] < 1:
            raise CommandError("--workers must be at least 1", returncode=EXIT_ERROR)

        try:
            rows = run_scan(spec, options['workers'])
        except (TilingError, KeyError) as exc:
            raise fail(exc, options['grid'])
        try:
            write_rows(rows, options['out'], options['overwrite'])
        except OSError as exc:
            raise CommandError(f"cannot write {options['out']}: {exc.strerror}", returncode=EXIT_ERROR)

        if options['save']:
            label = options['label'] if options['label'] is not None else spec.get('label', '')
            for row in rows:
                ScanRow.from_result(row, label)

        counts = {}
        for row in rows:
            counts[row.verdict] = counts.get(row.verdict, 0) + 1
        summary = ', '.join(f"{verdict}={count}" for verdict, count in sorted(counts.items()))
        self.stdout.write(f"{len(rows)} rows -> {options['out']}" + (f" ({summary})" if summary else ''))
