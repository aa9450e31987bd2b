import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from Geometry.lensSpace import LensPoint, hausdorff_lens_distance

from .datasets import MetricDataset
from .metrics import PointOutsideDisc, moore_distance
from .samplers import sample_circle, sample_lens, sample_moore
from .serializers import load_dataset, save_dataset


class CircleSamplerTests(SimpleTestCase):

    def test_noiseless_points_on_unit_circle(self):
        data = sample_circle(4, 0.0, seed=1)
        self.assertEqual(len(data), 4)
        np.testing.assert_allclose(np.linalg.norm(data.points, axis=1), np.ones(4), atol=1e-15)

    def test_noisy_mean_radius(self):
        data = sample_circle(10000, 0.1, seed=2)
        self.assertLess(abs(np.linalg.norm(data.points, axis=1).mean() - 1.0), 0.02)

    def test_single_point(self):
        self.assertEqual(sample_circle(1, 0.1, seed=0).points.shape, (1, 2))

    def test_seed_determinism(self):
        a = sample_circle(50, 0.1, seed=9)
        b = sample_circle(50, 0.1, seed=9)
        self.assertTrue(np.array_equal(a.points, b.points))

    def test_invalid_arguments(self):
        with self.assertRaises(ValueError):
            sample_circle(0)
        with self.assertRaises(ValueError):
            sample_circle(5, -0.1)


class MooreDistanceTests(SimpleTestCase):

    def test_self_dissimilarity_is_modulus(self):
        self.assertAlmostEqual(moore_distance(0.5, 0.5), 0.5, places=14)

    def test_orthogonal_interior_points_collapse(self):
        self.assertEqual(moore_distance(0.5, 0.5j), 0.0)
        self.assertEqual(moore_distance(0.3, -0.8j), 0.0)

    def test_boundary_orbit_identified(self):
        self.assertAlmostEqual(moore_distance(1.0, np.exp(2j * np.pi / 3)), 0.0, places=7)

    def test_boundary_pair(self):
        self.assertAlmostEqual(moore_distance(1.0, np.exp(1j * np.pi / 6)), np.pi / 6, places=7)

    def test_symmetric_and_z3_invariant_on_boundary(self):
        rng = np.random.default_rng(4)
        zeta = np.exp(2j * np.pi / 3)
        for _ in range(200):
            r = np.sqrt(rng.uniform(size=2))
            x, y = r * np.exp(2j * np.pi * rng.uniform(size=2))
            self.assertAlmostEqual(moore_distance(x, y), moore_distance(y, x), delta=1e-12)
            rim = np.exp(2j * np.pi * rng.uniform())
            self.assertAlmostEqual(moore_distance(x, rim), moore_distance(x, zeta * rim), delta=1e-9)

    def test_point_outside_disc(self):
        with self.assertRaises(PointOutsideDisc):
            moore_distance(1.5, 0.0)


class MooreSamplerTests(SimpleTestCase):

    def test_points_in_disc(self):
        data = sample_moore(500, seed=3)
        self.assertEqual(data.metric_id, 'moore')
        self.assertTrue(np.all(np.abs(data.points) <= 1.0))

    def test_boundary_points_appended(self):
        data = sample_moore(100, seed=3, n_boundary=10)
        self.assertEqual(len(data), 110)
        self.assertEqual(data.metadata['boundary_indices'], list(range(100, 110)))
        np.testing.assert_allclose(np.abs(data.points[100:]), np.ones(10), atol=1e-15)

    def test_seed_determinism_and_single_point(self):
        self.assertTrue(np.array_equal(sample_moore(30, seed=5).points, sample_moore(30, seed=5).points))
        self.assertEqual(len(sample_moore(1, seed=0)), 1)

    def test_distance_matrix_has_zero_diagonal(self):
        matrix = sample_moore(40, seed=1, n_boundary=5).distance_matrix()
        np.testing.assert_array_equal(np.diag(matrix), np.zeros(45))
        np.testing.assert_allclose(matrix, matrix.T)
        self.assertTrue(np.all(np.isfinite(matrix)))


class LensSamplerTests(SimpleTestCase):

    def test_unit_representatives(self):
        data = sample_lens(200, 3, seed=1)
        np.testing.assert_allclose(np.linalg.norm(data.points, axis=1), np.ones(200), atol=1e-12)

    def test_self_distance_zero(self):
        data = sample_lens(20, 3, seed=2)
        np.testing.assert_array_equal(np.diag(data.distance_matrix()), np.zeros(20))

    def test_distances_match_orbit_quotient(self):
        data = sample_lens(200, 3, seed=3)
        for i in range(100):
            a = LensPoint(data.points[2 * i], 3)
            b = LensPoint(data.points[2 * i + 1], 3)
            self.assertAlmostEqual(data.distance(2 * i, 2 * i + 1), hausdorff_lens_distance(a, b), delta=1e-7)

    def test_composite_modulus_rejected(self):
        with self.assertRaises(ValueError):
            sample_lens(10, 4, seed=0)


class MetricDatasetTests(SimpleTestCase):

    def test_blocks_agree_with_full_matrix(self):
        data = sample_circle(30, 0.1, seed=0)
        full = data.distance_matrix()
        np.testing.assert_allclose(data.block([3, 5], [1, 2, 3]), full[np.ix_([3, 5], [1, 2, 3])])

    @override_settings(LENS_DISTANCE_MATRIX_CAP=10)
    def test_size_cap(self):
        data = sample_circle(11, 0.0, seed=0)
        with self.assertRaises(ValueError):
            data.distance_matrix()
        self.assertEqual(data.distances_to([0, 1]).shape, (11, 2))

    def test_subset_keeps_parent_indices(self):
        data = sample_lens(10, 5, seed=0)
        sub = data.subset([7, 2])
        self.assertEqual(sub.metadata['parent_indices'], [7, 2])
        self.assertEqual(sub.q, 5)
        np.testing.assert_array_equal(sub.points[0], data.points[7])

    def test_unknown_metric(self):
        with self.assertRaises(ValueError):
            MetricDataset(points=np.zeros((2, 2)), metric_id='manhattan')

    def test_json_document(self):
        data = sample_lens(5, 3, seed=4)
        with tempfile.TemporaryDirectory() as tmp:
            path = save_dataset(data, Path(tmp) / 'lens.json')
            loaded = load_dataset(path)
        self.assertEqual(loaded.q, 3)
        self.assertEqual(loaded.metric_id, 'lens')
        np.testing.assert_allclose(loaded.points, data.points, atol=1e-15)


class SampleCommandTests(SimpleTestCase):

    def test_writes_moore_dataset(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / 'moore.json'
            call_command('sample', space='moore', points=20, boundary=3, seed=1, out=str(out), stdout=StringIO())
            data = load_dataset(out)
        self.assertEqual(len(data), 23)
        self.assertEqual(data.metadata['boundary_indices'], [20, 21, 22])

    def test_invalid_modulus_is_config_error(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(CommandError) as ctx:
                call_command('sample', space='lens', points=5, q=4, out=str(Path(tmp) / 'x.json'))
        self.assertEqual(ctx.exception.returncode, 2)
