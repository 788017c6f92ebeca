from django.core.management.base import BaseCommand, CommandError

from tiling.exceptions import TilingError
from tiling.services.refuter import refute_by_crossing, verify_refutation
from tiling.utils.textio import block_spec_from, parse_block_assignments
from ._common import EXIT_ERROR, EXIT_UNKNOWN, fail, load_graph, write_text


class Command(BaseCommand):
    help = ("Certify non-tileability from the block profiles of K_{s,s} copies; "
            "exit 0 with a certificate, 2 when inconclusive.")

    def add_arguments(self, parser):
        parser.add_argument('graph', help="Graph file in bigraph text format")
        parser.add_argument('--s', type=int, default=None, help="Tile size; defaults to the file header")
        parser.add_argument('--block', action='append', default=[], metavar='NAME=RANGES',
                            help="Block assignment such as U1=0..6; repeat for U1, U2, V1, V2")
        parser.add_argument('--out', help="Refutation certificate to write; stdout when omitted")

    def handle(self, *args, **options):
        parsed = load_graph(options['graph'])
        G = parsed.graph
        s = options['s'] or parsed.s
        try:
            blocks = block_spec_from(parse_block_assignments(options['block'])) or parsed.blocks
            if blocks is None:
                raise CommandError("no blocks given and the graph file carries none", returncode=EXIT_ERROR)
            outcome = refute_by_crossing(G, blocks, s)
        except TilingError as exc:
            raise fail(exc, options['graph'])

        self.stdout.write(f"realizable profiles: {' '.join(sig.label() for sig in outcome.realizable)}")
        if not outcome.refuted:
            raise CommandError(f"inconclusive: {outcome.describe()}", returncode=EXIT_UNKNOWN)

        check = verify_refutation(G, outcome)
        if not check:
            raise CommandError(f"refutation failed its re-check: {check.violation}", returncode=EXIT_ERROR)
        for line in outcome.system_lines():
            self.stdout.write(f"  {line}")
        self.stdout.write("refuted: the profile system has no nonnegative integer solution")
        if options['out']:
            write_text(options['out'], outcome.to_text())
            self.stdout.write(f"wrote {options['out']}")
        else:
            self.stdout.write(outcome.to_text(), ending='')
