from django.core.management.base import BaseCommand, CommandError

from tiling.exceptions import TilingError
from tiling.services.runner import check_certificate
from ._common import EXIT_NEGATIVE, fail, load_graph, read_text


class Command(BaseCommand):
    help = "Re-check a tiling or refutation certificate against a graph; exit 0 valid, 1 invalid."

    def add_arguments(self, parser):
        parser.add_argument('graph', help="Graph file in bigraph text format")
        parser.add_argument('certificate', help="Tiling or refutation certificate")

    def handle(self, *args, **options):
        G = load_graph(options['graph']).graph
        try:
            report = check_certificate(G, read_text(options['certificate']))
        except TilingError as exc:
            raise fail(exc, options['certificate'])

        if not report.ok:
            raise CommandError(f"invalid {report.kind} certificate: {report.violation}", returncode=EXIT_NEGATIVE)
        self.stdout.write(f"valid {report.kind} certificate")
