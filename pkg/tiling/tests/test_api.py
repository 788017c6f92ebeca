from unittest.mock import patch

from django.core.cache import cache
from django.urls import reverse
from rest_framework import status
from rest_framework.test import APITestCase

from tiling.models import GraphInstance, ScanRow
from tiling.services.constructions import zhao_gadget
from tiling.services.scan import run_scan
from tiling.utils.bigraph import BalancedBigraph
from tiling.utils.textio import write_graph

K44 = write_graph(BalancedBigraph.complete(4), 2)


class ConstructionAPITests(APITestCase):
    """Test the construction endpoint"""

    def setUp(self):
        self.url = reverse('construction-create')

    def test_build_and_save(self):
        """Test building a gadget and storing it"""
        data = {'family': 'zhao', 'params': {'s': 2, 'k': 1}, 'save': True}
        response = self.client.post(self.url, data, format='json')
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(response.data['delta_sum'], 6)
        self.assertEqual(response.data['blocks']['U1'], '0..2')
        self.assertTrue(response.data['graph'].startswith('bigraph 6 2'))
        self.assertTrue(GraphInstance.objects.filter(id=response.data['id']).exists())

    def test_unknown_family(self):
        """Test that unknown families fail validation"""
        response = self.client.post(self.url, {'family': 'petersen'}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('family', response.data)

    def test_bad_parameters(self):
        """Test that generator errors come back as 400"""
        data = {'family': 'zhao', 'params': {'s': 1, 'k': 1}}
        response = self.client.post(self.url, data, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('error', response.data)
        self.assertFalse(GraphInstance.objects.exists())


class TilingAPITests(APITestCase):
    """Test the tiling endpoint"""

    def setUp(self):
        self.url = reverse('tiling-create')

    def test_tiled(self):
        """Test that K_{4,4} is tiled with a certificate"""
        response = self.client.post(self.url, {'graph': K44}, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['verdict'], 'tiled')
        self.assertTrue(response.data['tiling'].startswith('tiling 4 2'))

    def test_absent(self):
        """Test the verdict on the smallest balanced gadget"""
        response = self.client.post(self.url, {'graph': zhao_gadget(2, 1).to_text()}, format='json')
        self.assertEqual(response.data['verdict'], 'absent')
        self.assertIsNone(response.data['tiling'])

    def test_pipeline_mode(self):
        """Test that pipeline mode reports fallback and trace"""
        data = {'graph': K44, 'mode': 'pipeline', 'alpha': '1/3'}
        response = self.client.post(self.url, data, format='json')
        self.assertEqual(response.data['verdict'], 'tiled')
        self.assertTrue(response.data['fallback'])
        self.assertTrue(response.data['trace'])

    def test_validation(self):
        """Test divisibility, α range and unparsable graphs"""
        for data in ({'graph': K44, 's': 3}, {'graph': K44, 'alpha': '5'}, {'graph': 'nonsense'}):
            response = self.client.post(self.url, data, format='json')
            self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST, data)


class RefutationAPITests(APITestCase):
    """Test the refutation endpoint"""

    def setUp(self):
        self.url = reverse('refutation-create')

    def test_refuted_with_graph_blocks(self):
        """Test refutation using blocks stored in the graph text"""
        response = self.client.post(self.url, {'graph': zhao_gadget(2, 1).to_text()}, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertTrue(response.data['refuted'])
        self.assertTrue(response.data['verified'])
        self.assertEqual(response.data['realizable'], ['(0,2,0,2)', '(2,0,2,0)'])
        self.assertEqual(len(response.data['system']), 3)

    def test_inconclusive_with_explicit_blocks(self):
        """Test a feasible profile system"""
        data = {'graph': K44, 'blocks': ['U1=0..1', 'U2=2..3', 'V1=0..1', 'V2=2..3']}
        response = self.client.post(self.url, data, format='json')
        self.assertFalse(response.data['refuted'])
        self.assertIn('feasible', response.data['witness'])

    def test_blocks_required(self):
        """Test that a graph without blocks needs them in the request"""
        response = self.client.post(self.url, {'graph': K44}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('blocks', response.data)


class VerificationAPITests(APITestCase):
    """Test the verification endpoint"""

    def setUp(self):
        self.url = reverse('verification-create')
        self.gadget = zhao_gadget(2, 1).to_text()

    def test_valid_refutation(self):
        """Test that a certificate from the refutation endpoint verifies"""
        certificate = self.client.post(reverse('refutation-create'), {'graph': self.gadget},
                                       format='json').data['certificate']
        response = self.client.post(self.url, {'graph': self.gadget, 'certificate': certificate}, format='json')
        self.assertEqual(response.data, {'kind': 'refutation', 'valid': True, 'violation': None})

    def test_invalid_tiling(self):
        """Test that a wrong tiling is reported with its violation"""
        certificate = 'tiling 4 2\nc 0 1 | 0 1\n'
        response = self.client.post(self.url, {'graph': K44, 'certificate': certificate}, format='json')
        self.assertFalse(response.data['valid'])
        self.assertIn('uncovered', response.data['violation'])

    def test_unparsable_certificate(self):
        """Test that an empty certificate is a 400"""
        response = self.client.post(self.url, {'graph': K44, 'certificate': '# nothing'}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)


class ThresholdAPITests(APITestCase):
    """Test the threshold endpoint and its cache"""

    def setUp(self):
        self.url = reverse('threshold-detail')
        cache.clear()

    def test_degree_sum_threshold(self):
        """Test n + 3s − 5 for s=3, m=10"""
        response = self.client.get(self.url, {'s': 3, 'm': 10})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['threshold'], 34)
        self.assertEqual(response.data['n'], 30)

    def test_cached(self):
        """Test that a repeated query is served from the cache"""
        self.client.get(self.url, {'s': 4, 'm': 5, 'kind': 'main2', 'd': 1})
        with patch('tiling.views.threshold') as mock_threshold:
            response = self.client.get(self.url, {'s': 4, 'm': 5, 'kind': 'main2', 'd': 1})
        mock_threshold.assert_not_called()
        self.assertEqual(response.data['threshold'], 25)

    def test_out_of_range(self):
        """Test that inadmissible parameters are a 400"""
        response = self.client.get(self.url, {'s': 4, 'm': 5, 'kind': 'main2', 'd': 2})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        response = self.client.get(self.url, {'s': 3, 'm': 0})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)


class ListAPITests(APITestCase):
    """Test the stored instance and scan row listings"""

    def test_graph_list(self):
        """Test that saved instances are listed"""
        GraphInstance.from_construction(zhao_gadget(2, 1))
        response = self.client.get(reverse('graph-list'))
        self.assertEqual(response.data['count'], 1)
        self.assertEqual(response.data['results'][0]['delta_sum'], 6)

    def test_scan_rows_by_label(self):
        """Test the label filter"""
        rows = run_scan({'rows': [{'family': 'zhao', 'params': {'s': 2, 'k': 1}, 'refute': True}]})
        ScanRow.from_result(rows[0], 'first')
        ScanRow.from_result(rows[0], 'second')
        response = self.client.get(reverse('scan-row-list'), {'label': 'first'})
        self.assertEqual(response.data['count'], 1)
        self.assertEqual(response.data['results'][0]['verdict'], 'refuted')
