import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.test import SimpleTestCase

from Geometry.lensSpace import lens_distance, lens_distance_matrix, roots_of_unity
from Landmarks.selection import LandmarkSet, maxmin_landmarks
from Landmarks.serializers import save_landmarks
from Persistence.cohomology import Cocycle, persistent_cohomology
from Persistence.diagrams import select_class
from Persistence.rips import build_rips, landmark_distances
from Persistence.serializers import save_persistence
from Spaces.datasets import MetricDataset
from Spaces.samplers import sample_circle
from Spaces.serializers import save_dataset

from .classifyingMap import (
    CoverageFailure,
    InvalidScale,
    LensMapConfig,
    MissingEdge,
    Uncovered,
    classify,
    lens_coordinates,
    partition_of_unity,
)
from .serializers import load_cloud


def circle_setup(n_points=1000, n_landmarks=10, seed=0, q=3, noise=0.05):
    data = sample_circle(n_points, noise, seed=seed)
    landmarks = maxmin_landmarks(data, n_landmarks, rng_seed=seed)
    complex_ = build_rips(landmark_distances(data, landmarks.indices))
    result = persistent_cohomology(complex_, q)
    admissible = [(b, d) for b, d in result.diagrams[1].finite_pairs if 2 * b < d]
    if not admissible:
        raise AssertionError(f"Circle fixture has no pair with 2a < b: {result.diagrams[1].pairs}")
    pair, index = select_class(result.diagrams[1])
    cocycle = result.cocycles[index]
    return data, landmarks, cocycle, LensMapConfig.for_class(pair, q), result


class PartitionOfUnityTests(SimpleTestCase):

    def test_isolated_landmark(self):
        np.testing.assert_array_equal(partition_of_unity([0.0, 5.0, 5.0], 1.0), [1.0, 0.0, 0.0])

    def test_equidistant_pair(self):
        np.testing.assert_allclose(partition_of_unity([0.4, 0.4, 2.0], 1.0), [0.5, 0.5, 0.0])

    def test_normalized(self):
        rng = np.random.default_rng(0)
        weights = partition_of_unity(rng.uniform(0, 2, size=(500, 12)) * [[0.1] + [1] * 11], 1.0)
        np.testing.assert_allclose(weights.sum(axis=1), np.ones(500), atol=1e-12)
        self.assertTrue(np.all(weights >= 0))

    def test_uncovered(self):
        with self.assertRaises(Uncovered):
            partition_of_unity([1.0, 2.0], 1.0)


class ClassifyTests(SimpleTestCase):

    def setUp(self):
        self.cfg = LensMapConfig(epsilon=1.0, q=3)

    def test_zero_cocycle_gives_square_root_weights(self):
        eta = Cocycle(q=3, values={(0, 1): 0, (0, 2): 0, (1, 2): 0}, valid_below=10.0)
        d = [0.2, 0.5, 0.9]
        point = classify(d, eta, self.cfg)
        np.testing.assert_allclose(point.rep, np.sqrt(partition_of_unity(d, 1.0)), atol=1e-15)

    def test_single_ball(self):
        eta = Cocycle(q=3, values={(0, 1): 2}, valid_below=10.0)
        point = classify([3.0, 0.5], eta, self.cfg)
        np.testing.assert_allclose(point.rep, [0, 1], atol=1e-15)

    def test_two_charts_differ_by_a_root_of_unity(self):
        eta = Cocycle(q=3, values={(0, 1): 1}, valid_below=10.0)
        zeta = roots_of_unity(3)[1]
        first = classify([0.3, 0.3], eta, self.cfg, chart=0)
        second = classify([0.3, 0.3], eta, self.cfg, chart=1)
        np.testing.assert_allclose(first.rep, np.sqrt(0.5) * np.array([1, zeta]), atol=1e-15)
        np.testing.assert_allclose(second.rep, zeta ** 2 * first.rep, atol=1e-15)
        self.assertLess(lens_distance(first, second), 1e-9)

    def test_missing_edge(self):
        eta = Cocycle(q=3, values={}, valid_below=10.0)
        with self.assertRaises(MissingEdge):
            classify([0.3, 0.3], eta, self.cfg)

    def test_chart_must_contain_point(self):
        eta = Cocycle(q=3, values={(0, 1): 0}, valid_below=10.0)
        with self.assertRaises(Uncovered):
            classify([0.3, 1.5], eta, self.cfg, chart=1)

    def test_chart_independence_on_circle(self):
        data, landmarks, cocycle, cfg, _ = circle_setup()
        distances = data.distances_to(landmarks.indices)
        checked = 0
        for row in distances:
            charts = np.flatnonzero(row < cfg.epsilon)
            reference = classify(row, cocycle, cfg)
            for chart in charts:
                self.assertLess(lens_distance(reference, classify(row, cocycle, cfg, chart=int(chart))), 1e-9)
            checked += charts.size > 1
        self.assertGreater(checked, 100)


class LensMapConfigTests(SimpleTestCase):

    def test_automatic_epsilon(self):
        self.assertAlmostEqual(LensMapConfig.for_class((1.0, 3.0), 3).epsilon, 1.0 + 1e-5, places=15)

    def test_short_bar_keeps_epsilon_below_half_death(self):
        cfg = LensMapConfig.for_class((1.0, 2.0 + 1e-6), 3)
        self.assertLess(2 * cfg.epsilon, 2.0 + 1e-6)
        self.assertGreaterEqual(cfg.epsilon, 1.0)

    def test_circle_fixture_is_admissible_across_seeds(self):
        for seed in range(3):
            _, _, cocycle, cfg, _ = circle_setup(n_points=300, seed=seed)
            self.assertLess(2 * cocycle.birth, cocycle.death)
            self.assertLess(2 * cfg.epsilon, cocycle.death)

    def test_inadmissible_class(self):
        with self.assertRaises(InvalidScale):
            LensMapConfig.for_class((1.0, 1.5), 3)

    def test_scale_checked_against_cocycle(self):
        eta = Cocycle(q=3, values={}, valid_below=1.0, birth=0.2, death=1.0)
        with self.assertRaises(InvalidScale):
            LensMapConfig(epsilon=0.6, q=3).validate(eta)
        with self.assertRaises(InvalidScale):
            LensMapConfig(epsilon=0.1, q=3).validate(eta)
        with self.assertRaises(InvalidScale):
            LensMapConfig(epsilon=0.3, q=5).validate(eta)
        LensMapConfig(epsilon=0.3, q=3).validate(eta)


class LensCoordinatesTests(SimpleTestCase):

    def test_landmarks_map_to_basis_vectors(self):
        data = MetricDataset(points=np.array([[0.0], [3.0], [6.0]]), metric_id='euclidean')
        landmarks = LandmarkSet(indices=[0, 1, 2], cover_radius=0.0)
        eta = Cocycle(q=3, values={(0, 1): 1, (0, 2): 2, (1, 2): 0}, valid_below=10.0)
        cloud = lens_coordinates(data, landmarks, eta, LensMapConfig(epsilon=1.0, q=3))
        np.testing.assert_allclose(cloud.reps, np.eye(3), atol=1e-15)

    def test_circle_cloud(self):
        data, landmarks, cocycle, cfg, _ = circle_setup()
        cloud = lens_coordinates(data, landmarks, cocycle, cfg)
        self.assertEqual(cloud.reps.shape, (1000, 10))
        np.testing.assert_allclose(np.linalg.norm(cloud.reps, axis=1), np.ones(1000), atol=1e-12)
        self.assertLess(cloud.coverage['partition_error'], 1e-12)
        self.assertGreaterEqual(cloud.coverage['min_multiplicity'], 1)
        cloud.validate(chart_entries=True)

    def test_cohomologous_cocycles_give_isometric_clouds(self):
        data, landmarks, cocycle, cfg, _ = circle_setup(n_points=300)
        base = lens_coordinates(data, landmarks, cocycle, cfg)
        reference = lens_distance_matrix(base.reps, base.reps, 3)
        rng = np.random.default_rng(8)
        for _ in range(20):
            alpha = rng.integers(0, 3, size=len(landmarks))
            shifted = lens_coordinates(data, landmarks, cocycle.add_coboundary(alpha), cfg)
            distances = lens_distance_matrix(shifted.reps, shifted.reps, 3)
            self.assertLess(np.abs(distances - reference).max(), 1e-6)
            # coordinate k picks up zeta^alpha_k up to a global root of unity
            rotated = base.reps * roots_of_unity(3)[alpha]
            for a, b in zip(rotated[:20], shifted.reps[:20]):
                ratio = np.vdot(a, b)
                self.assertAlmostEqual(abs(ratio), 1.0, places=9)

    def test_coverage_failure(self):
        data = sample_circle(100, 0.1, seed=1)
        landmarks = maxmin_landmarks(data, 4, seeds=[0])
        eta = Cocycle(q=3, values={(j, k): 0 for j in range(4) for k in range(j + 1, 4)}, valid_below=10.0)
        with self.assertRaises(CoverageFailure) as ctx:
            lens_coordinates(data, landmarks, eta, LensMapConfig(epsilon=1e-3, q=3))
        self.assertGreater(len(ctx.exception.uncovered), 90)
        self.assertEqual(ctx.exception.exit_code, 3)


class LensMapCommandTests(SimpleTestCase):

    def test_matches_direct_computation(self):
        data, landmarks, cocycle, cfg, result = circle_setup(n_points=200)
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            save_dataset(data, tmp / 'data.json')
            save_landmarks(landmarks, tmp / 'landmarks.json')
            save_persistence(result, tmp / 'diagrams_q3.json', tmp / 'cocycles_q3.json')
            call_command('lens_map', dataset=str(tmp / 'data.json'), landmarks=str(tmp / 'landmarks.json'),
                         cocycles=str(tmp / 'cocycles_q3.json'), out=str(tmp / 'cloud.json'), stdout=StringIO())
            cloud = load_cloud(tmp / 'cloud.json')
        expected = lens_coordinates(data, landmarks, cocycle, cfg)
        self.assertEqual(cloud.q, 3)
        self.assertEqual(cloud.source_indices, list(range(200)))
        np.testing.assert_allclose(cloud.reps, expected.reps, atol=1e-15)
