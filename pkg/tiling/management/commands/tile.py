from django.core.management.base import BaseCommand, CommandError

from tiling.exceptions import TilingError
from tiling.services.runner import MODES, solve
from tiling.services.tiler import Verdict
from tiling.utils.textio import write_tiling
from ._common import EXIT_NEGATIVE, EXIT_UNKNOWN, alpha_option, fail, load_graph, write_text


class Command(BaseCommand):
    help = "Decide whether a graph has a K_{s,s}-tiling; exit 0 tiled, 1 absent, 2 unknown."

    def add_arguments(self, parser):
        parser.add_argument('graph', help="Graph file in bigraph text format")
        parser.add_argument('--s', type=int, default=None, help="Tile size; defaults to the file header")
        parser.add_argument('--mode', choices=MODES, default='exact')
        parser.add_argument('--budget', type=int, default=None, help="Decision budget for the exact search")
        parser.add_argument('--alpha', default=None, help="Extremal parameter for --mode pipeline, e.g. 1/64")
        parser.add_argument('--out', help="Tiling certificate to write; stdout when omitted")

    def handle(self, *args, **options):
        parsed = load_graph(options['graph'])
        G = parsed.graph
        s = options['s'] or parsed.s
        try:
            outcome = solve(G, s, options['mode'], options['budget'], alpha_option(options['alpha']))
        except TilingError as exc:
            raise fail(exc, options['graph'])

        if options['verbosity'] >= 2:
            for line in outcome.trace:
                self.stderr.write(line)

        summary = f"verdict: {outcome.verdict.value} (n={G.n}, s={s}, mode={options['mode']}, nodes={outcome.nodes})"
        if outcome.verdict is Verdict.TILED:
            text = write_tiling(outcome.tiling, G.n)
            if options['out']:
                write_text(options['out'], text)
                self.stdout.write(summary)
            else:
                self.stderr.write(summary)
                self.stdout.write(text, ending='')
            return
        if outcome.verdict is Verdict.ABSENT:
            raise CommandError(f"no K_{{{s},{s}}}-tiling exists; {summary}", returncode=EXIT_NEGATIVE)
        raise CommandError(f"undecided; {summary}", returncode=EXIT_UNKNOWN)
