from itertools import combinations

from django.test import SimpleTestCase

from tiling.exceptions import (
    CapacityError,
    FloorViolationError,
    GadgetError,
    InfeasibleDeletionError,
    InvalidParameterError,
    NoSidonSetError,
    RetryExhaustedError,
)
from tiling.services.constructions import (
    CrossBlock,
    PropertyReport,
    build,
    canonical_family,
    delete_preserving_min_degree,
    disjoint_shifts,
    field_sidon_set,
    p_graph,
    planted_extremal,
    random_bigraph,
    random_lower_gadget,
    sidon_set,
    sqrt_gadget,
    unbalanced_gadget,
    unbalanced_min_k,
    zhao_gadget,
)
from tiling.utils.bigraph import min_degrees, popcount
from tiling.utils.textio import read_graph
from tiling.utils.thresholds import c_of_s, ceil_sqrt


def is_sidon(values, m):
    differences = [(a - b) % m for a in values for b in values if a != b]
    return len(differences) == len(set(differences))


class SidonSetTests(SimpleTestCase):
    """Test the Sidon set search"""

    def test_finds_sets(self):
        """Test that found sets have distinct differences"""
        for m, p in [(7, 3), (13, 4), (21, 5), (31, 6)]:
            found = sidon_set(m, p)
            self.assertIsNotNone(found, f"mod {m}, size {p}")
            self.assertEqual(len(found), p)
            self.assertIn(0, found)
            self.assertTrue(is_sidon(found, m))

    def test_counting_bound(self):
        """Test that p(p−1) > m−1 has no solution"""
        self.assertIsNone(sidon_set(7, 4))

    def test_trivial_sizes(self):
        """Test sizes zero and one"""
        self.assertEqual(sidon_set(5, 0), frozenset())
        self.assertEqual(sidon_set(1, 1), frozenset({0}))

    def test_step_limit_reports_absence(self):
        """Test that an exhausted step limit without a field window returns None"""
        # the smallest field window for size 10 lives mod 120
        self.assertIsNone(sidon_set(95, 10, step_limit=5))

    def test_step_limit_uses_field_window(self):
        """Test that an exhausted search falls back to a field window"""
        found = sidon_set(300, 10, step_limit=5)
        self.assertIsNotNone(found)
        self.assertEqual(len(found), 10)
        self.assertIn(0, found)
        self.assertTrue(is_sidon(found, 300))

    def test_invalid_parameters(self):
        """Test that m < 1 is rejected"""
        with self.assertRaises(InvalidParameterError):
            sidon_set(0, 1)


class FieldSidonSetTests(SimpleTestCase):
    """Test the Sidon sets from the multiplicative group of GF(q²)"""

    def test_sizes_and_differences(self):
        """Test q elements mod q²−1 with distinct differences, none a multiple of q+1"""
        for q in (3, 5, 7, 11, 13):
            found = field_sidon_set(q)
            order = q * q - 1
            self.assertEqual(len(set(found)), q)
            self.assertTrue(all(0 <= a < order for a in found))
            self.assertTrue(is_sidon(found, order), f"q={q}")
            for a, b in combinations(found, 2):
                self.assertNotEqual((a - b) % (q + 1), 0, f"q={q}: {a}, {b}")

    def test_rejects_non_primes(self):
        """Test that q must be an odd prime"""
        for q in (2, 9, 1):
            with self.assertRaises(InvalidParameterError):
                field_sidon_set(q)


class DisjointShiftsTests(SimpleTestCase):
    """Test translates with pairwise disjoint supports"""

    def test_translates_are_disjoint(self):
        """Test that every returned translate pair is disjoint"""
        for m, connection, count in [(29, {0, 1, 3, 7}, 3), (47, {0, 1, 3, 7}, 4), (120, {0, 1, 5}, 10)]:
            shifts = disjoint_shifts(m, connection, count)
            self.assertIsNotNone(shifts)
            self.assertEqual(len(set(shifts)), count)
            translates = [{(t + d) % m for d in connection} for t in shifts]
            for a, b in combinations(translates, 2):
                self.assertFalse(a & b, f"mod {m}")

    def test_no_room(self):
        """Test that the Fano difference set admits no two disjoint translates"""
        self.assertIsNone(disjoint_shifts(7, {0, 1, 3}, 2))
        self.assertIsNone(disjoint_shifts(3, {0}, 4))

    def test_trivial_counts(self):
        """Test zero translates and an empty connection set"""
        self.assertEqual(disjoint_shifts(7, {0, 1, 3}, 0), ())
        self.assertEqual(disjoint_shifts(5, (), 3), (0, 1, 2))


class PGraphTests(SimpleTestCase):
    """Test the circulant K_{2,2}-free graphs"""

    def test_regular_and_c4_free(self):
        """Test p-regularity and at most one common neighbour per U-pair"""
        for m, p in [(7, 3), (13, 4), (31, 6)]:
            G = p_graph(m, p)
            self.assertTrue(all(len(row) == p for row in G.adj_u))
            self.assertTrue(all(len(row) == p for row in G.adj_v))
            for a, b in combinations(range(m), 2):
                self.assertLessEqual(popcount(G.masks_u[a] & G.masks_u[b]), 1)

    def test_missing_sidon_set(self):
        """Test that an impossible size raises"""
        with self.assertRaises(NoSidonSetError):
            p_graph(7, 4)

    def test_explicit_connection_set(self):
        """Test that an explicit connection set is used as given"""
        G = p_graph(7, 3, frozenset({0, 1, 3}))
        self.assertEqual(G.adj_u[0], frozenset({0, 1, 3}))
        self.assertEqual(G.adj_u[6], frozenset({6, 0, 2}))


class DeletionTests(SimpleTestCase):
    """Test source deletion under a target degree floor"""

    def setUp(self):
        self.block = CrossBlock.circulant(7, frozenset({0, 1, 3}))

    def test_keeps_floor(self):
        """Test that one deletion keeps degree two"""
        kept, indices = delete_preserving_min_degree(self.block, 1, 2)
        self.assertEqual(kept.sources, 6)
        self.assertEqual(len(indices), 6)
        self.assertEqual(kept.min_target_degree(), 2)

    def test_floor_cannot_hold(self):
        """Test that a second deletion must drop some target to one"""
        with self.assertRaises(FloorViolationError):
            delete_preserving_min_degree(self.block, 2, 2)

    def test_floor_above_current(self):
        """Test that an unreachable floor is rejected up front"""
        with self.assertRaises(FloorViolationError) as ctx:
            delete_preserving_min_degree(self.block, 0, 4)
        self.assertEqual(ctx.exception.achieved, 3)

    def test_too_many_deletions(self):
        """Test that deleting more sources than exist is infeasible"""
        with self.assertRaises(InfeasibleDeletionError):
            delete_preserving_min_degree(self.block, 8, 0)

    def test_exact_search_after_greedy_miss(self):
        """Test a removal set the greedy order misses"""
        # greedy drops source 0 first, after which only one of 3 and 4 can follow
        block = CrossBlock((frozenset({0, 1}), frozenset({0}), frozenset({1}), frozenset({2}), frozenset({2})), 3)
        kept, indices = delete_preserving_min_degree(block, 3, 1)
        self.assertEqual(indices, (0, 4))
        self.assertEqual(kept.min_target_degree(), 1)

    def test_preferred_sources_first(self):
        """Test that preferred sources are removed when they keep the floor"""
        block = CrossBlock((frozenset({0, 1}), frozenset({0}), frozenset({1}), frozenset({2}), frozenset({2})), 3)
        _, indices = delete_preserving_min_degree(block, 3, 1, prefer=(4, 2, 1))
        self.assertEqual(indices, (0, 3))

    def test_repeated_pair(self):
        """Test that a K_{2,2} is reported and a Sidon circulant has none"""
        self.assertIsNone(self.block.repeated_pair())
        self.assertEqual(CrossBlock.circulant(8, frozenset({0, 1, 2})).repeated_pair(), (1, 2))

    def test_transposed(self):
        """Test that transposing twice restores the block"""
        self.assertEqual(self.block.transposed().transposed(), self.block)


class ZhaoGadgetTests(SimpleTestCase):
    """Test the balanced extremal gadget"""

    def test_degree_identity(self):
        """Test δ_U+δ_V = n+3s−6"""
        for s, k in [(2, 1), (2, 3), (3, 1), (3, 2), (4, 3)]:
            construction = zhao_gadget(s, k)
            G = construction.graph
            self.assertEqual(G.n, (2 * k + 1) * s)
            self.assertEqual(min_degrees(G, s).delta_sum, G.n + 3 * s - 6, f"zhao({s},{k})")

    def test_block_layout(self):
        """Test block sizes |U1| = ks+1 and |V1| = ks+s−1"""
        construction = zhao_gadget(3, 2)
        self.assertEqual(construction.blocks.sizes, (7, 8, 8, 7))
        construction.blocks.validate(15)

    def test_identity_text(self):
        """Test the printed identity for s=2, k=1"""
        self.assertEqual(zhao_gadget(2, 1).identity, 'δ_U+δ_V = 6 = n+3s−6')

    def test_invalid_parameters(self):
        """Test that s < 2 is rejected"""
        with self.assertRaises(InvalidParameterError):
            zhao_gadget(1, 1)


class UnbalancedGadgetTests(SimpleTestCase):
    """Test the gadget with unequal one-sided degrees"""

    def assert_identity(self, s, k, j, parity):
        G = unbalanced_gadget(s, k, j, parity).graph
        profile = min_degrees(G, s)
        label = f"unbalanced_{parity}({s},{k},{j})"
        self.assertEqual(profile.delta_sum, G.n + 3 * s - 7, label)
        self.assertGreaterEqual(profile.delta_gap, 2 * s * j - s - 1, label)
        self.assertLessEqual(profile.delta_gap, 2 * s * j - 1, label)

    def test_even(self):
        """Test the even construction"""
        self.assert_identity(2, 3, 1, 'even')
        self.assert_identity(2, 13, 1, 'even')
        self.assert_identity(3, 9, 1, 'even')

    def test_odd(self):
        """Test the odd construction"""
        self.assert_identity(2, 13, 1, 'odd')

    def test_guaranteed_scale(self):
        """Test the least k at which both cross blocks are certain to exist"""
        self.assertEqual(unbalanced_min_k(2, 1, 'even'), 1)
        self.assertEqual(unbalanced_min_k(3, 1, 'even'), 15)
        self.assertEqual(unbalanced_min_k(2, 1, 'odd'), 9)
        self.assertEqual(unbalanced_min_k(2, 2, 'even'), 26)
        self.assertEqual(unbalanced_min_k(2, 2, 'odd'), 50)

    def test_from_guaranteed_scale(self):
        """Test three consecutive scales from the guaranteed one"""
        for s, j, parity in [(2, 1, 'even'), (3, 1, 'even'), (4, 1, 'even'),
                             (2, 1, 'odd'), (3, 1, 'odd'), (2, 2, 'even'), (2, 2, 'odd')]:
            start = unbalanced_min_k(s, j, parity)
            for k in range(start, start + 3):
                self.assert_identity(s, k, j, parity)

    def test_second_imbalance(self):
        """Test j = 2 sets the gap to [3s−1, 4s−1]"""
        profile = min_degrees(unbalanced_gadget(2, 26, 2, 'even').graph, 2)
        self.assertGreaterEqual(profile.delta_gap, 5)
        self.assertLessEqual(profile.delta_gap, 7)

    def test_part_sizes(self):
        """Test n = 2ks for even and (2k+1)s for odd"""
        self.assertEqual(unbalanced_gadget(2, 3, 1, 'even').graph.n, 12)
        self.assertEqual(unbalanced_gadget(2, 13, 1, 'odd').graph.n, 54)

    def test_rejects_zero_imbalance(self):
        """Test that j = 0 is rejected"""
        with self.assertRaises(GadgetError):
            unbalanced_gadget(2, 3, 0, 'even')

    def test_rejects_small_k(self):
        """Test that k < j is rejected"""
        with self.assertRaises(GadgetError):
            unbalanced_gadget(2, 1, 2, 'even')

    def test_rejects_unknown_parity(self):
        """Test that parity must be even or odd"""
        with self.assertRaises(InvalidParameterError):
            unbalanced_gadget(2, 3, 1, 'neither')


class SqrtGadgetTests(SimpleTestCase):
    """Test the square-root gadget"""

    def test_degree_identity(self):
        """Test δ_U+δ_V = n+2s−2⌈√s⌉+c(s)−1"""
        for s, k1 in [(2, 1), (3, 1), (4, 1), (5, 1), (5, 2), (6, 1), (8, 1)]:
            construction = sqrt_gadget(s, k1)
            G = construction.graph
            expected = G.n + 2 * s - 2 * ceil_sqrt(s) + c_of_s(s) - 1
            self.assertEqual(min_degrees(G, s).delta_sum, expected, f"sqrt({s},{k1})")
            self.assertGreaterEqual(construction.notes['k2'], s * k1)

    def test_split_values(self):
        """Test x=2, y=3 for s=5"""
        construction = sqrt_gadget(5, 1)
        self.assertEqual((construction.notes['x'], construction.notes['y']), (2, 3))
        self.assertIn('x=2 y=3 xy=6', construction.identity)

    def test_invalid_parameters(self):
        """Test that k1 < 1 is rejected"""
        with self.assertRaises(InvalidParameterError):
            sqrt_gadget(4, 0)


class RandomFamilyTests(SimpleTestCase):
    """Test the seeded random generators"""

    def test_random_bigraph_is_reproducible(self):
        """Test that equal seeds give equal graphs"""
        first = random_bigraph(10, 0.5, seed=3).graph
        second = random_bigraph(10, 0.5, seed=3).graph
        self.assertEqual(first, second)
        self.assertNotEqual(first, random_bigraph(10, 0.5, seed=4).graph)

    def test_random_bigraph_rates(self):
        """Test the two extreme rates"""
        self.assertEqual(random_bigraph(5, 1.0).graph.edge_count, 25)
        self.assertEqual(random_bigraph(5, 0.0).graph.edge_count, 0)
        with self.assertRaises(InvalidParameterError):
            random_bigraph(5, 1.5)

    def test_planted_extremal_blocks(self):
        """Test that planted instances carry their blocks"""
        construction = planted_extremal(20, 2, 8, seed=1)
        self.assertEqual(construction.blocks.sizes, (8, 12, 8, 12))
        construction.blocks.validate(20)
        with self.assertRaises(InvalidParameterError):
            planted_extremal(20, 2, 0)

    def test_random_lower_retry_exhaustion(self):
        """Test that a dense sample containing K_{d,s} exhausts the retries"""
        with self.assertRaises(RetryExhaustedError) as ctx:
            random_lower_gadget(8, retry_cap=2)
        report = ctx.exception.report
        self.assertEqual((report.d, report.a, report.b), (4, 64, 128))
        self.assertTrue(report.degree_ok)
        self.assertFalse(report.kds_free)
        self.assertEqual(ctx.exception.attempts, 2)

    def test_random_lower_capacity(self):
        """Test that a too small n is rejected"""
        with self.assertRaises(CapacityError):
            random_lower_gadget(8, n=10)

    def test_counting_contradiction(self):
        """Test s·⌈a/(d−1)⌉ > b on a passing report"""
        report = PropertyReport(
            s=8, c=2.0, d=4, a=64, b=128, edge_probability=1.0, attempts=1,
            min_degree_a=128, min_degree_b=64, required_degree_a=128, required_degree_b=64,
        )
        self.assertTrue(report.passed)
        self.assertTrue(report.counting_contradiction)
        self.assertTrue(report.as_dict()['counting_contradiction'])


class RegistryTests(SimpleTestCase):
    """Test family lookup and building by name"""

    def test_aliases(self):
        """Test alias resolution"""
        self.assertEqual(canonical_family('pgraph'), 'p_graph')
        self.assertEqual(canonical_family('sqrt'), 'sqrt_gadget')
        with self.assertRaises(InvalidParameterError):
            canonical_family('petersen')

    def test_build_by_name(self):
        """Test building through the registry"""
        construction = build('pgraph', m=7, p=3)
        self.assertEqual(construction.family, 'p_graph')
        self.assertEqual(construction.graph.n, 7)
        self.assertEqual(build('unbalanced', s=2, k=13, j=1, parity='odd').family, 'unbalanced_odd')

    def test_bad_parameter_names(self):
        """Test that missing or unknown parameters are reported"""
        with self.assertRaises(InvalidParameterError):
            build('zhao', s=2)
        with self.assertRaises(InvalidParameterError):
            build('zhao', s=2, k=1, q=4)

    def test_text_carries_metadata(self):
        """Test that the written graph keeps family, blocks and identity"""
        construction = zhao_gadget(3, 1)
        parsed = read_graph(construction.to_text())
        self.assertEqual(parsed.graph, construction.graph)
        self.assertEqual(parsed.s, 3)
        self.assertEqual(parsed.metadata['family'], 'zhao')
        self.assertEqual(parsed.blocks, construction.blocks)
