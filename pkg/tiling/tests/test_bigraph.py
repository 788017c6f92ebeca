from django.test import SimpleTestCase

from tiling.exceptions import BlockPartitionError, EmptyPartError, InvalidGraphError, MixedPartError
from tiling.utils.bigraph import (
    BalancedBigraph,
    BlockSpec,
    KssCopy,
    Side,
    Tiling,
    Vertex,
    bits,
    common_neighborhood,
    density,
    mask_of,
    min_degrees,
    popcount,
    verify_tiling,
)


def two_disjoint_k33():
    """K_{3,3} on U0-2/V0-2 plus K_{3,3} on U3-5/V3-5."""
    edges = [(u, v) for u in range(3) for v in range(3)]
    edges += [(u, v) for u in range(3, 6) for v in range(3, 6)]
    return BalancedBigraph.from_edges(6, edges)


class BigraphConstructionTests(SimpleTestCase):
    """Test graph construction and mirror validation"""

    def test_from_edges_builds_mirrors(self):
        """Test that both adjacency sides agree"""
        G = BalancedBigraph.from_edges(3, [(0, 1), (2, 1), (2, 2)])
        self.assertEqual(G.adj_u[2], frozenset({1, 2}))
        self.assertEqual(G.adj_v[1], frozenset({0, 2}))
        self.assertEqual(G.edge_count, 3)

    def test_out_of_range_edge_rejected(self):
        """Test that edges outside 0..n-1 are rejected"""
        with self.assertRaises(InvalidGraphError):
            BalancedBigraph.from_edges(2, [(0, 2)])

    def test_broken_mirror_rejected(self):
        """Test that an asymmetric adjacency is rejected"""
        with self.assertRaises(InvalidGraphError):
            BalancedBigraph(2, (frozenset({0}), frozenset()), (frozenset(), frozenset()))

    def test_complete_and_empty(self):
        """Test the complete and empty constructors"""
        self.assertEqual(BalancedBigraph.complete(4).edge_count, 16)
        self.assertEqual(BalancedBigraph.empty(4).edge_count, 0)

    def test_transposed_swaps_sides(self):
        """Test that transposing swaps U and V neighbourhoods"""
        G = BalancedBigraph.from_edges(3, [(0, 2), (1, 2)])
        T = G.transposed()
        self.assertEqual(T.adj_u[2], frozenset({0, 1}))
        self.assertTrue(T.has_edge(2, 0))
        self.assertFalse(T.has_edge(0, 2))

    def test_induced_relabels(self):
        """Test that induced subgraphs carry index maps"""
        G = two_disjoint_k33()
        H, us, vs = G.induced([3, 4], [4, 5])
        self.assertEqual(us, (3, 4))
        self.assertEqual(vs, (4, 5))
        self.assertEqual(H.edge_count, 4)

    def test_induced_needs_equal_parts(self):
        """Test that unequal induced parts are rejected"""
        with self.assertRaises(InvalidGraphError):
            two_disjoint_k33().induced([0, 1], [0])


class DegreeQueryTests(SimpleTestCase):
    """Test degree profiles and neighbourhood queries"""

    def test_bit_helpers(self):
        """Test popcount, mask_of and bits agree"""
        mask = mask_of([0, 3, 5])
        self.assertEqual(mask, 0b101001)
        self.assertEqual(popcount(mask), 3)
        self.assertEqual(list(bits(mask)), [0, 3, 5])

    def test_min_degrees_with_decomposition(self):
        """Test δ_U = k1·s + s + r for K_{6,6} at s=2"""
        profile = min_degrees(BalancedBigraph.complete(6), 2)
        self.assertEqual((profile.delta_u, profile.delta_v), (6, 6))
        self.assertEqual((profile.k1, profile.r, profile.k2), (2, 0, 1))
        self.assertEqual(profile.delta_sum, 12)
        self.assertEqual(profile.delta_gap, 0)

    def test_min_degrees_without_decomposition(self):
        """Test that k1 is omitted when δ_U < s"""
        G = BalancedBigraph.from_edges(2, [(0, 0), (1, 1)])
        profile = min_degrees(G, 2)
        self.assertFalse(profile.decomposed)
        self.assertIsNone(profile.k1)

    def test_min_degrees_on_empty_part(self):
        """Test that n=0 has no degree profile"""
        with self.assertRaises(EmptyPartError):
            min_degrees(BalancedBigraph.empty(0), 1)

    def test_density(self):
        """Test exact edge density"""
        G = two_disjoint_k33()
        self.assertEqual(density(G, range(6), range(6)), 1 / 2)
        self.assertEqual(density(G, [0], [0, 3]), 1 / 2)
        with self.assertRaises(EmptyPartError):
            density(G, [], [0])

    def test_common_neighborhood(self):
        """Test common neighbourhood from plain indices and Vertex tuples"""
        G = two_disjoint_k33()
        self.assertEqual(common_neighborhood(G, [0, 1], Side.U), frozenset({0, 1, 2}))
        self.assertEqual(common_neighborhood(G, [0, 3], Side.U), frozenset())
        self.assertEqual(common_neighborhood(G, [Vertex(Side.V, 4)]), frozenset({3, 4, 5}))
        self.assertEqual(common_neighborhood(G, [], Side.U), frozenset(range(6)))

    def test_common_neighborhood_mixed_sides(self):
        """Test that mixing sides is rejected"""
        with self.assertRaises(MixedPartError):
            common_neighborhood(two_disjoint_k33(), [Vertex(Side.U, 0), Vertex(Side.V, 0)])


class TilingVerificationTests(SimpleTestCase):
    """Test the independent tiling checker"""

    def setUp(self):
        self.G = two_disjoint_k33()

    def test_valid_tiling(self):
        """Test that two K_{3,3} copies tile the graph"""
        T = Tiling(3, (KssCopy((0, 1, 2), (0, 1, 2)), KssCopy((3, 4, 5), (3, 4, 5))))
        self.assertTrue(verify_tiling(self.G, T))

    def test_missing_edge_names_copy(self):
        """Test that a swapped vertex is reported with its copy index"""
        T = Tiling(3, (KssCopy((0, 1, 3), (0, 1, 2)), KssCopy((2, 4, 5), (3, 4, 5))))
        check = verify_tiling(self.G, T)
        self.assertFalse(check)
        self.assertEqual(check.copy_index, 0)
        self.assertIn('copy 0', check.violation)

    def test_overlap_detected(self):
        """Test that overlapping copies are rejected"""
        G = BalancedBigraph.complete(4)
        T = Tiling(2, (KssCopy((0, 1), (0, 1)), KssCopy((1, 2), (2, 3))))
        check = verify_tiling(G, T)
        self.assertEqual(check.copy_index, 1)
        self.assertIn('overlaps', check.violation)

    def test_uncovered_vertex(self):
        """Test that partial tilings are rejected"""
        T = Tiling(3, (KssCopy((0, 1, 2), (0, 1, 2)),))
        check = verify_tiling(self.G, T)
        self.assertFalse(check)
        self.assertIn('uncovered', check.violation)

    def test_wrong_copy_size(self):
        """Test that copies of the wrong size are rejected"""
        T = Tiling(3, (KssCopy((0, 1), (0, 1, 2)),))
        self.assertFalse(verify_tiling(self.G, T))

    def test_transposed_tiling(self):
        """Test that transposing graph and tiling together keeps validity"""
        G = BalancedBigraph.from_edges(2, [(0, 1), (1, 0)])
        T = Tiling(1, (KssCopy((0,), (1,)), KssCopy((1,), (0,))))
        self.assertTrue(verify_tiling(G.transposed(), T.transposed()))


class BlockSpecTests(SimpleTestCase):
    """Test four-block partitions"""

    def test_valid_partition(self):
        """Test sizes and validation of a proper partition"""
        spec = BlockSpec(range(2), range(2, 5), range(3), range(3, 5))
        spec.validate(5)
        self.assertEqual(spec.sizes, (2, 3, 3, 2))

    def test_overlap_rejected(self):
        """Test that overlapping blocks are rejected"""
        with self.assertRaises(BlockPartitionError):
            BlockSpec([0, 1], [1, 2], [0], [1, 2]).validate(3)

    def test_missing_vertex_rejected(self):
        """Test that blocks must cover the part"""
        with self.assertRaises(BlockPartitionError):
            BlockSpec([0], [1], [0], [1, 2]).validate(3)
