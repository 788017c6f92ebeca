from fractions import Fraction

from django.core.management.base import BaseCommand, CommandError

from tiling.exceptions import TilingError
from tiling.utils.bigraph import min_degrees
from tiling.utils.thresholds import theorem_report
from ._common import EXIT_ERROR, fail, load_graph


class Command(BaseCommand):
    help = "Print the degree profile of a graph and the sufficient tiling conditions it meets."

    def add_arguments(self, parser):
        parser.add_argument('graph', help="Graph file in bigraph text format")
        parser.add_argument('--s', type=int, default=None, help="Tile size; defaults to the file header")
        parser.add_argument('--lam', default=None, help="λ for the δ_U ≥ λn hypothesis, e.g. 1/10")

    def handle(self, *args, **options):
        parsed = load_graph(options['graph'])
        G = parsed.graph
        s = options['s'] or parsed.s
        lam = None
        if options['lam'] is not None:
            try:
                lam = Fraction(options['lam'])
            except (ValueError, ZeroDivisionError):
                raise CommandError(f"--lam must be a number, got {options['lam']!r}", returncode=EXIT_ERROR)

        try:
            profile = min_degrees(G, s)
            checks = theorem_report(G, s, lam)
        except TilingError as exc:
            raise fail(exc, options['graph'])

        family = parsed.metadata.get('family')
        self.stdout.write(f"n={G.n} s={s} edges={G.edge_count}" + (f" family={family}" if family else ''))
        self.stdout.write(f"δ_U={profile.delta_u} δ_V={profile.delta_v} "
                          f"δ_U+δ_V={profile.delta_sum} δ_V−δ_U={profile.delta_gap}")
        if profile.decomposed:
            self.stdout.write(f"δ_U = k1·s + s + r with k1={profile.k1} r={profile.r}; k2={profile.k2}")
        for check in checks:
            mark = 'yes' if check.applies else 'no'
            self.stdout.write(f"  [{mark:>3}] {check.name}: {check.detail}")
