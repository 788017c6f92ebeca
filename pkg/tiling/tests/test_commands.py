import json
import os
import tempfile
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from tiling.models import GraphInstance, ScanRow
from tiling.services.constructions import zhao_gadget
from tiling.utils.bigraph import BalancedBigraph
from tiling.utils.textio import read_graph, write_graph


class CommandTestCase(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def write(self, name, text):
        path = self.path(name)
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
        return path

    def run_command(self, *args, **options):
        out, err = StringIO(), StringIO()
        call_command(*args, stdout=out, stderr=err, **options)
        return out.getvalue(), err.getvalue()


class ConstructCommandTests(CommandTestCase):
    """Test the construct command"""

    def test_graph_to_stdout(self):
        """Test that the graph goes to stdout and the summary to stderr"""
        out, err = self.run_command('construct', 'zhao', s=2, k=1)
        parsed = read_graph(out)
        self.assertEqual(parsed.graph.n, 6)
        self.assertIn('zhao: n=6 s=2', err)
        self.assertIn('n+3s−6', err)

    def test_out_file_and_save(self):
        """Test writing to a file and storing the instance"""
        target = self.path('zhao.txt')
        out, _ = self.run_command('construct', 'zhao', s=3, k=1, out=target, save=True)
        self.assertIn(f"wrote {target}", out)
        self.assertEqual(read_graph(open(target, encoding='utf-8').read()).graph, zhao_gadget(3, 1).graph)
        instance = GraphInstance.objects.get()
        self.assertEqual((instance.family, instance.n, instance.s), ('zhao', 9, 3))
        self.assertEqual(instance.parameters, {'s': 3, 'k': 1})

    def test_unknown_family(self):
        """Test that an unknown family exits with status 3"""
        with self.assertRaises(CommandError) as ctx:
            self.run_command('construct', 'petersen')
        self.assertEqual(ctx.exception.returncode, 3)

    def test_retry_exhaustion_prints_report(self):
        """Test that a failing random gadget prints its property report"""
        err = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command('construct', 'random', s=8, stdout=StringIO(), stderr=err)
        self.assertEqual(ctx.exception.returncode, 3)
        self.assertIn('kds_free: False', err.getvalue())


class TileCommandTests(CommandTestCase):
    """Test the tile command exit statuses"""

    def test_tiled(self):
        """Test that a tileable graph writes a certificate"""
        graph = self.write('k4.txt', write_graph(BalancedBigraph.complete(4), 2))
        target = self.path('tiling.txt')
        out, _ = self.run_command('tile', graph, out=target)
        self.assertIn('verdict: tiled', out)
        self.assertTrue(open(target, encoding='utf-8').read().startswith('tiling 4 2'))

    def test_absent(self):
        """Test status 1 for a gadget without tiling"""
        graph = self.write('zhao.txt', zhao_gadget(2, 1).to_text())
        with self.assertRaises(CommandError) as ctx:
            self.run_command('tile', graph)
        self.assertEqual(ctx.exception.returncode, 1)

    def test_unknown(self):
        """Test status 2 when the budget runs out"""
        graph = self.write('k6.txt', write_graph(BalancedBigraph.complete(6), 2))
        with self.assertRaises(CommandError) as ctx:
            self.run_command('tile', graph, budget=1)
        self.assertEqual(ctx.exception.returncode, 2)

    def test_unreadable_graph(self):
        """Test status 3 for a missing or malformed file"""
        with self.assertRaises(CommandError) as ctx:
            self.run_command('tile', self.path('missing.txt'))
        self.assertEqual(ctx.exception.returncode, 3)
        broken = self.write('broken.txt', 'e 0 0\n')
        with self.assertRaises(CommandError) as ctx:
            self.run_command('tile', broken)
        self.assertEqual(ctx.exception.returncode, 3)

    def test_bad_alpha(self):
        """Test that α outside (0, 1) is an error"""
        graph = self.write('k4.txt', write_graph(BalancedBigraph.complete(4), 2))
        with self.assertRaises(CommandError) as ctx:
            self.run_command('tile', graph, mode='pipeline', alpha='2')
        self.assertEqual(ctx.exception.returncode, 3)


class RefuteAndVerifyCommandTests(CommandTestCase):
    """Test refute and verify together"""

    def setUp(self):
        super().setUp()
        self.graph = self.write('zhao.txt', zhao_gadget(2, 1).to_text())

    def test_refute_then_verify(self):
        """Test that a written refutation verifies"""
        certificate = self.path('refutation.txt')
        out, _ = self.run_command('refute', self.graph, out=certificate)
        self.assertIn('realizable profiles: (0,2,0,2) (2,0,2,0)', out)
        self.assertIn('refuted:', out)
        out, _ = self.run_command('verify', self.graph, certificate)
        self.assertIn('valid refutation certificate', out)

    def test_inconclusive(self):
        """Test status 2 when the profile system is feasible"""
        graph = self.write('k4.txt', write_graph(BalancedBigraph.complete(4), 2))
        with self.assertRaises(CommandError) as ctx:
            self.run_command('refute', graph, block=['U1=0..1', 'U2=2..3', 'V1=0..1', 'V2=2..3'])
        self.assertEqual(ctx.exception.returncode, 2)

    def test_missing_blocks(self):
        """Test that a graph without blocks needs --block"""
        graph = self.write('k4.txt', write_graph(BalancedBigraph.complete(4), 2))
        with self.assertRaises(CommandError) as ctx:
            self.run_command('refute', graph)
        self.assertEqual(ctx.exception.returncode, 3)

    def test_invalid_certificate(self):
        """Test status 1 for a certificate that does not hold"""
        certificate = self.path('refutation.txt')
        self.run_command('refute', self.graph, out=certificate)
        other = self.write('k6.txt', write_graph(BalancedBigraph.complete(6), 2))
        with self.assertRaises(CommandError) as ctx:
            self.run_command('verify', other, certificate)
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn('invalid refutation certificate', str(ctx.exception))

    def test_verify_tiling(self):
        """Test that a tiling written by tile verifies"""
        graph = self.write('k4.txt', write_graph(BalancedBigraph.complete(4), 2))
        certificate = self.path('tiling.txt')
        self.run_command('tile', graph, out=certificate)
        out, _ = self.run_command('verify', graph, certificate)
        self.assertIn('valid tiling certificate', out)


class ScanCommandTests(CommandTestCase):
    """Test the scan command"""

    def test_scan_and_save(self):
        """Test CSV output, the summary and stored rows"""
        grid = self.write('grid.json', json.dumps({
            'label': 'gadgets',
            'rows': [{'family': 'zhao', 'params': {'s': 2, 'k': [1, 2]}, 'refute': True}],
        }))
        out_csv = self.path('rows.csv')
        out, _ = self.run_command('scan', grid, out_csv, save=True)
        self.assertIn('2 rows', out)
        self.assertIn('refuted=2', out)
        self.assertEqual(ScanRow.objects.filter(label='gadgets').count(), 2)
        self.assertEqual(len(open(out_csv, encoding='utf-8').read().splitlines()), 3)

    def test_invalid_json(self):
        """Test status 3 for a malformed grid"""
        grid = self.write('grid.json', '{not json')
        with self.assertRaises(CommandError) as ctx:
            self.run_command('scan', grid, self.path('rows.csv'))
        self.assertEqual(ctx.exception.returncode, 3)


class InfoCommandTests(CommandTestCase):
    """Test the info command"""

    def test_reports_conditions(self):
        """Test the degree line and the condition marks"""
        graph = self.write('k4.txt', write_graph(BalancedBigraph.complete(4), 2))
        out, _ = self.run_command('info', graph)
        self.assertIn('n=4 s=2 edges=16', out)
        self.assertIn('δ_U=4 δ_V=4', out)
        self.assertIn('[yes] min-degree', out)
