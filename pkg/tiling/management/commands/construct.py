from django.core.management.base import BaseCommand

from tiling.exceptions import RetryExhaustedError, TilingError
from tiling.models import GraphInstance
from tiling.services.constructions import build, canonical_family
from tiling.utils.bigraph import min_degrees
from ._common import fail, write_text

# generator keyword -> flag type
PARAMETER_FLAGS = {
    's': int, 'k': int, 'k1': int, 'j': int, 'm': int, 'p': int, 'seed': int,
    'n': int, 'rate': float, 'a': int, 'removal': float, 'noise': float, 'parity': str,
}


class Command(BaseCommand):
    help = "Build a gadget or generator instance and write it in bigraph text format."

    def add_arguments(self, parser):
        parser.add_argument('family', help="zhao, pgraph, unbalanced_even, unbalanced_odd, unbalanced, "
                                           "sqrt, random, random_bigraph or planted")
        for name, kind in PARAMETER_FLAGS.items():
            parser.add_argument(f'--{name}', type=kind, default=None)
        parser.add_argument('--out', help="Graph file to write; stdout when omitted")
        parser.add_argument('--save', action='store_true', help="Also store the instance in the database")

    def handle(self, *args, **options):
        params = {name: options[name] for name in PARAMETER_FLAGS if options[name] is not None}
        try:
            family = canonical_family(options['family'])
            construction = build(family, **params)
        except RetryExhaustedError as exc:
            for key, value in exc.report.as_dict().items():
                self.stderr.write(f"  {key}: {value}")
            raise fail(exc, options['family'])
        except TilingError as exc:
            raise fail(exc, options['family'])

        # the summary goes to stderr when stdout carries the graph
        report = self.stdout if options['out'] else self.stderr
        profile = min_degrees(construction.graph, construction.s)
        report.write(f"{construction.family}: n={construction.graph.n} s={construction.s} "
                     f"δ_U={profile.delta_u} δ_V={profile.delta_v}")
        if construction.identity:
            report.write(construction.identity)
        if construction.report is not None and construction.report.counting_contradiction:
            report.write("counting argument rules out a tiling")

        text = construction.to_text()
        if options['out']:
            write_text(options['out'], text)
            report.write(f"wrote {options['out']}")
        else:
            self.stdout.write(text, ending='')

        if options['save']:
            instance = GraphInstance.from_construction(construction)
            report.write(f"saved as graph instance {instance.id}")
