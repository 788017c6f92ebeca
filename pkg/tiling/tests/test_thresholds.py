from django.test import SimpleTestCase

from tiling.exceptions import ThresholdRangeError
from tiling.utils.bigraph import BalancedBigraph
from tiling.utils.thresholds import (
    ThresholdKind,
    c_of_s,
    ceil_sqrt,
    main2_d_range,
    square_split,
    theorem_report,
    threshold,
)


class CorrectionTermTests(SimpleTestCase):
    """Test ⌈√s⌉ and the {0,1} correction term"""

    def test_ceil_sqrt(self):
        """Test exact integer ceiling square roots"""
        self.assertEqual([ceil_sqrt(s) for s in range(1, 11)], [1, 2, 2, 2, 3, 3, 3, 3, 3, 4])
        self.assertEqual(ceil_sqrt(10 ** 30), 10 ** 15)
        self.assertEqual(ceil_sqrt(10 ** 30 + 1), 10 ** 15 + 1)

    def test_square_split(self):
        """Test s = p² + q with 0 ≤ q ≤ 2p"""
        self.assertEqual(square_split(8), (2, 4))
        self.assertEqual(square_split(9), (3, 0))

    def test_c_of_s_table(self):
        """Test c(s) on the first squares and their neighbours"""
        expected = {1: 0, 2: 1, 3: 0, 4: 0, 5: 1, 6: 1, 7: 0, 8: 0, 9: 0, 10: 1, 12: 1, 13: 0}
        for s, value in expected.items():
            self.assertEqual(c_of_s(s), value, f"c({s})")

    def test_c_of_s_needs_positive_s(self):
        """Test that c(0) is rejected"""
        with self.assertRaises(ThresholdRangeError):
            c_of_s(0)

    def test_main2_d_range(self):
        """Test the admissible offsets"""
        self.assertEqual(list(main2_d_range(2)), [0])
        self.assertEqual(list(main2_d_range(4)), [0, 1])
        self.assertEqual(list(main2_d_range(9)), [0, 1, 2, 3, 4])


class ThresholdTests(SimpleTestCase):
    """Test the degree threshold formulas"""

    def test_matching_threshold(self):
        """Test that s = 1 needs δ_U+δ_V ≥ n"""
        self.assertEqual(threshold(1, 7, 'hall'), 7)
        with self.assertRaises(ThresholdRangeError):
            threshold(2, 7, ThresholdKind.HALL)

    def test_min_degree_threshold_parity(self):
        """Test both parities of the minimum degree bound"""
        self.assertEqual(threshold(2, 4, 'zhao'), 5)
        self.assertEqual(threshold(2, 3, 'zhao'), 4)
        self.assertEqual(threshold(3, 3, 'zhao'), 7)

    def test_degree_sum_threshold(self):
        """Test n + 3s − 5"""
        self.assertEqual(threshold(3, 10, 'main1'), 34)

    def test_sqrt_threshold(self):
        """Test n + 2s − 2⌈√s⌉ + d + c(s)"""
        self.assertEqual(threshold(4, 5, 'main2', 1), 25)
        self.assertEqual(threshold(5, 2, 'main2'), 10 + 10 - 6 + 1)

    def test_sqrt_threshold_rejects_large_d(self):
        """Test that d outside the admissible range is rejected"""
        with self.assertRaises(ThresholdRangeError):
            threshold(4, 5, 'main2', 2)

    def test_bad_parameters(self):
        """Test m < 1, s < 2 and unknown kinds"""
        with self.assertRaises(ThresholdRangeError):
            threshold(3, 0, 'main1')
        with self.assertRaises(ThresholdRangeError):
            threshold(1, 3, 'main1')
        with self.assertRaises(ValueError):
            threshold(3, 3, 'bogus')


class TheoremReportTests(SimpleTestCase):
    """Test which sufficient conditions a graph meets"""

    def test_complete_graph_meets_min_degree(self):
        """Test that K_{4,4} at s=2 satisfies every degree condition"""
        checks = {check.name: check for check in theorem_report(BalancedBigraph.complete(4), 2)}
        self.assertTrue(checks['min-degree'].applies)
        self.assertTrue(checks['degree-sum'].applies)
        self.assertIn('λ unchecked', checks['degree-sum'].detail)

    def test_lambda_check(self):
        """Test that a user-supplied λ is enforced"""
        checks = {check.name: check for check in theorem_report(BalancedBigraph.complete(4), 2, lam=2)}
        self.assertFalse(checks['degree-sum'].applies)

    def test_divisibility(self):
        """Test that s must divide n"""
        checks = theorem_report(BalancedBigraph.complete(5), 2)
        self.assertEqual(len(checks), 1)
        self.assertFalse(checks[0].applies)

    def test_matching_case(self):
        """Test that s = 1 reports only the matching condition"""
        G = BalancedBigraph.from_edges(2, [(0, 0), (1, 1)])
        checks = theorem_report(G, 1)
        self.assertEqual([check.name for check in checks], ['matching'])
        self.assertTrue(checks[0].applies)
