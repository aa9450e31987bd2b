import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, tag
from scipy.spatial.distance import cdist, pdist

from core.ioUtils import read_json
from Landmarks.selection import maxmin_landmarks
from LensMap.classifyingMap import LensCloud
from Persistence.cohomology import persistent_cohomology
from Persistence.diagrams import per_ratio, select_class
from Persistence.rips import build_rips
from Spaces.datasets import MetricDataset
from Spaces.samplers import sample_circle, sample_lens
from Spaces.serializers import save_dataset

from .comparison import PerRatioComparison, compare_per_ratio, per_ratios
from .isomap import (
    DisconnectedGraph,
    InvalidIsomapConfig,
    IsomapConfig,
    classical_mds,
    geodesic_distances,
    isomap,
    knn_graph,
)
from .serializers import load_embedding


def planar(points):
    return MetricDataset(points=np.asarray(points, dtype=float), metric_id='euclidean')


class IsomapTests(SimpleTestCase):

    def test_complete_graph_reproduces_euclidean_distances(self):
        points = np.random.default_rng(0).uniform(-1, 1, size=(15, 2))
        embedding = isomap(planar(points), IsomapConfig(k_neighbors=14, target_dim=2))
        np.testing.assert_allclose(pdist(embedding.coords), pdist(points), atol=1e-6)

    def test_collinear_points(self):
        embedding = isomap(planar([[0.0], [1.0], [3.0]]), IsomapConfig(k_neighbors=2, target_dim=1))
        np.testing.assert_allclose(pdist(embedding.coords), [1.0, 3.0, 2.0], atol=1e-9)

    def test_graph_distances_dominate_metric(self):
        points = np.random.default_rng(1).uniform(0, 1, size=(60, 2))
        graph = knn_graph(planar(points), 4)
        geodesics = geodesic_distances(graph, 4)
        direct = cdist(points, points)
        self.assertTrue(np.all(geodesics >= direct - 1e-12))
        rows, cols = graph.nonzero()
        np.testing.assert_allclose(geodesics[rows, cols], direct[rows, cols], atol=1e-12)

    def test_knn_graph_is_symmetric(self):
        graph = knn_graph(planar(np.random.default_rng(2).normal(size=(40, 2))), 3)
        self.assertEqual(abs(graph - graph.T).max(), 0.0)
        self.assertTrue(np.all(np.diff(graph.indptr) >= 3))

    def test_duplicate_points_keep_their_edge(self):
        graph = knn_graph(planar([[0.0], [0.0], [5.0]]), 1)
        self.assertGreater(graph[0, 1], 0.0)
        self.assertLess(graph[0, 1], 1e-300)
        embedding = isomap(planar([[0.0], [0.0], [5.0]]), IsomapConfig(k_neighbors=1, target_dim=1))
        np.testing.assert_allclose(pdist(embedding.coords), [0.0, 5.0, 5.0], atol=1e-9)

    def test_disconnected_graph(self):
        points = [[0.0], [0.1], [0.2], [0.3], [0.4], [100.0], [100.1], [100.2], [100.3], [100.4]]
        with self.assertRaises(DisconnectedGraph) as ctx:
            isomap(planar(points), IsomapConfig(k_neighbors=2, target_dim=1))
        self.assertEqual(ctx.exception.n_components, 2)

    def test_invalid_config(self):
        with self.assertRaises(InvalidIsomapConfig):
            IsomapConfig(k_neighbors=0).validate()
        with self.assertRaises(InvalidIsomapConfig):
            IsomapConfig(target_dim=0).validate()

    def test_mds_eigenvalues_are_nonnegative(self):
        D = np.random.default_rng(3).uniform(1, 2, size=(12, 12))
        D = 0.5 * (D + D.T)
        np.fill_diagonal(D, 0.0)
        coords, eigenvalues = classical_mds(D, 12)
        self.assertEqual(coords.shape, (12, 12))
        self.assertTrue(np.all(eigenvalues >= 0))

    def test_circle_keeps_one_dominant_class(self):
        data = sample_circle(300, 0.05, seed=4)
        embedding = isomap(data, IsomapConfig(k_neighbors=8, target_dim=2))
        landmarks = maxmin_landmarks(planar(embedding.coords), 30, seeds=[0])
        points = embedding.restricted(landmarks.indices)
        dgm = persistent_cohomology(build_rips(cdist(points, points)), 3).diagrams[1]
        select_class(dgm)
        self.assertGreater(per_ratio(dgm), 2.0)


class ComparisonTests(SimpleTestCase):

    def test_identical_distances_give_identical_ratios(self):
        points = sample_circle(40, 0.1, seed=5).points
        D = cdist(points, points)
        self.assertEqual(per_ratios(D, [2, 3]), per_ratios(D.copy(), [2, 3]))

    def test_table_layout(self):
        comparison = PerRatioComparison(q_list=[2, 3], isomap={2: 1.5, 3: 1.25}, lens={2: 3.0, 3: 1.0})
        frame = comparison.to_frame()
        self.assertEqual(list(frame.index), ['Isomap', 'Lens coordinates'])
        self.assertEqual(list(frame.columns), ['Z_2', 'Z_3'])
        self.assertTrue(comparison.lc_beats_isomap(2))
        self.assertFalse(comparison.lc_beats_isomap(3))
        self.assertIn('3.0000', comparison.to_text())
        self.assertEqual(comparison.as_document()['lc_beats_isomap'], {'2': True, '3': False})

    def test_compare_on_circle(self):
        data = sample_circle(200, 0.1, seed=6)
        landmarks = maxmin_landmarks(data, 20, seeds=[0])
        angles = np.angle(data.points[:, 0] + 1j * data.points[:, 1])
        reps = np.column_stack([np.exp(1j * angles), np.zeros(200)])
        cloud = LensCloud(reps=reps, q=3, source_indices=range(200))
        comparison = compare_per_ratio(data, landmarks, [2, 3], IsomapConfig(), cloud)
        self.assertEqual(len(comparison.rows), 4)
        for q in (2, 3):
            self.assertGreater(comparison.isomap[q], 0)
            self.assertGreater(comparison.lens[q], 0)


class IsomapCommandTests(SimpleTestCase):

    def test_writes_embedding(self):
        data = sample_circle(80, 0.05, seed=7)
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            save_dataset(data, tmp / 'data.json')
            call_command('isomap', dataset=str(tmp / 'data.json'), out=str(tmp / 'iso'), stdout=StringIO())
            embedding = load_embedding(tmp / 'iso' / 'embedding.json')
            payload = read_json(tmp / 'iso' / 'embedding.json')
        expected = isomap(data, IsomapConfig())
        np.testing.assert_allclose(embedding.coords, expected.coords, atol=1e-12)
        self.assertEqual(payload['k_neighbors'], 8)

    def test_invalid_knn(self):
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            save_dataset(sample_circle(20, 0.05, seed=8), tmp / 'data.json')
            with self.assertRaises(CommandError) as ctx:
                call_command('isomap', dataset=str(tmp / 'data.json'), knn=0, out=str(tmp / 'iso'),
                             stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)


@tag('slow')
class LensSpaceComparisonTests(SimpleTestCase):

    def test_lens_coordinates_keep_the_z3_class(self):
        data = sample_lens(3000, 3, seed=0)
        landmarks = maxmin_landmarks(data, 70, rng_seed=0)
        # the sample's own representatives are exact Lens coordinates of L_3^2
        cloud = LensCloud(reps=data.points, q=3, source_indices=range(len(data)))
        comparison = compare_per_ratio(data, landmarks, [2, 3], IsomapConfig(k_neighbors=8, target_dim=4), cloud)
        self.assertEqual(comparison.lens_dim, 2)
        self.assertTrue(comparison.lc_beats_isomap(3))
