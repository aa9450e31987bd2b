import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from core.ioUtils import read_json
from Geometry.lensSpace import LensPoint, lens_distance, lens_distance_matrix, roots_of_unity
from Landmarks.selection import maxmin_landmarks
from LensMap.classifyingMap import LensCloud, LensMapConfig, lens_coordinates
from LensMap.serializers import save_cloud
from Persistence.cohomology import persistent_cohomology
from Persistence.diagrams import select_class
from Persistence.rips import build_rips, landmark_distances
from Spaces.samplers import sample_circle

from .lensPca import (
    DegenerateProjection,
    EmptyCloud,
    choose_dim,
    last_lens_comp,
    lens_project,
    lpca,
    variance_profile,
    variance_table_row,
)
from .serializers import load_lpca


def random_unit_rows(rng, n_points, n):
    z = rng.normal(size=(n_points, n)) + 1j * rng.normal(size=(n_points, n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_cloud(n_points, n, q=3, seed=0):
    reps = random_unit_rows(np.random.default_rng(seed), n_points, n)
    return LensCloud(reps=reps, q=q, source_indices=list(range(n_points)))


class LensProjectTests(SimpleTestCase):

    def test_orthogonal_point_is_fixed(self):
        point, distance = lens_project([1, 0], LensPoint([0, 1], 3))
        np.testing.assert_allclose(point.rep, [0, 1])
        self.assertEqual(distance, 0.0)

    def test_half_way_point(self):
        _, distance = lens_project([1, 0, 0], LensPoint(np.array([1, 1, 0]) / np.sqrt(2), 3))
        self.assertAlmostEqual(distance, np.pi / 4, places=12)

    def test_point_in_span_is_degenerate(self):
        u = np.array([0.6, 0.8j])
        with self.assertRaises(DegenerateProjection):
            lens_project(u, LensPoint(roots_of_unity(3)[1] * u, 3))

    def test_distance_identity_and_optimality(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            u, v_rep = random_unit_rows(rng, 2, 3)
            v = LensPoint(v_rep, 3)
            projected, distance = lens_project(u, v)
            self.assertAlmostEqual(abs(np.vdot(u, projected.rep)), 0.0, places=12)
            self.assertAlmostEqual(lens_distance(v, projected), distance, places=9)
            self.assertAlmostEqual(distance, np.arccos(np.linalg.norm(v_rep - np.vdot(u, v_rep) * u)), places=7)
            for w in random_unit_rows(rng, 200, 3):
                w = w - np.vdot(u, w) * u
                self.assertLessEqual(distance, lens_distance(v, LensPoint.from_vector(w, 3)) + 1e-9)


class LastLensCompTests(SimpleTestCase):

    def test_single_direction(self):
        vector = last_lens_comp(np.array([[1, 0]] * 5, dtype=complex))
        np.testing.assert_allclose(np.abs(vector), [0, 1], atol=1e-12)

    def test_two_directions_in_c3(self):
        vector = last_lens_comp(np.array([[1, 0, 0], [0, 1, 0]], dtype=complex))
        np.testing.assert_allclose(np.abs(vector), [0, 0, 1], atol=1e-12)

    def test_representative_phases_do_not_matter(self):
        rng = np.random.default_rng(3)
        reps = random_unit_rows(rng, 60, 4)
        rotated = reps * roots_of_unity(3)[rng.integers(0, 3, size=60)][:, None]
        self.assertAlmostEqual(abs(np.vdot(last_lens_comp(reps), last_lens_comp(rotated))), 1.0, places=9)

    def test_empty_cloud(self):
        with self.assertRaises(EmptyCloud):
            last_lens_comp(np.zeros((0, 3), dtype=complex))


class LpcaTests(SimpleTestCase):

    def test_components_and_profile(self):
        cloud = random_cloud(200, 4)
        result = lpca(cloud)
        gram = result.components.conj().T @ result.components
        np.testing.assert_allclose(gram, np.eye(4), atol=1e-8)
        np.testing.assert_allclose(result.component(4), last_lens_comp(cloud))
        self.assertEqual(result.pvar[0], 0.0)
        self.assertEqual(result.pvar[-1], 1.0)
        self.assertTrue(np.all(np.diff(result.pvar) >= 0))
        self.assertEqual(len(result.reported_pvar), 3)
        self.assertEqual(result.zero_vector_count, 0)

    def test_coordinates_are_unit_classes(self):
        cloud = random_cloud(100, 5, seed=1)
        result = lpca(cloud)
        for k in range(1, 6):
            projected = cloud.reps @ result.components[:, :k].conj()
            self.assertTrue(np.all(np.linalg.norm(projected, axis=1) <= 1 + 1e-12))
            coords = result.coordinates(k)
            self.assertEqual(coords.reps.shape, (100, k))
            np.testing.assert_allclose(np.linalg.norm(coords.reps, axis=1), np.ones(100), atol=1e-12)
            self.assertEqual(coords.source_indices, list(range(100)))
        with self.assertRaises(ValueError):
            result.coordinates(6)

    def test_full_dimension_is_an_isometry(self):
        cloud = random_cloud(80, 3, seed=2)
        coords = lpca(cloud).coordinates(3)
        np.testing.assert_allclose(
            lens_distance_matrix(coords.reps, coords.reps, 3),
            lens_distance_matrix(cloud.reps, cloud.reps, 3),
            atol=1e-6,
        )

    def test_cloud_in_a_plane(self):
        reps = np.zeros((50, 3), dtype=complex)
        reps[:, :2] = random_unit_rows(np.random.default_rng(4), 50, 2)
        cloud = LensCloud(reps=reps, q=3, source_indices=list(range(50)))
        result = lpca(cloud)
        np.testing.assert_allclose(np.abs(result.component(3)), [0, 0, 1], atol=1e-10)
        coords = result.coordinates(2)
        np.testing.assert_allclose(
            lens_distance_matrix(coords.reps, coords.reps, 3),
            lens_distance_matrix(reps, reps, 3),
            atol=1e-6,
        )

    def test_single_point(self):
        cloud = LensCloud(reps=random_unit_rows(np.random.default_rng(5), 1, 3), q=3, source_indices=[7])
        result = lpca(cloud)
        self.assertAlmostEqual(result.reported_pvar[0], 1.0, places=9)
        self.assertAlmostEqual(result.var[1], (np.pi / 2) ** 2, places=9)
        coords = result.coordinates(1)
        self.assertEqual(coords.source_indices, [7])
        self.assertAlmostEqual(abs(coords.reps[0, 0]), 1.0, places=12)

    def test_phase_invariance_of_variance(self):
        rng = np.random.default_rng(6)
        cloud = random_cloud(100, 4, seed=6)
        rotated = LensCloud(
            reps=cloud.reps * roots_of_unity(3)[rng.integers(0, 3, size=100)][:, None],
            q=3,
            source_indices=cloud.source_indices,
        )
        np.testing.assert_allclose(lpca(rotated).var, lpca(cloud).var, atol=1e-9)

    def test_cohomologous_clouds_give_isometric_coordinates(self):
        data = sample_circle(300, 0.05, seed=0)
        landmarks = maxmin_landmarks(data, 10, rng_seed=0)
        result = persistent_cohomology(build_rips(landmark_distances(data, landmarks.indices)), 3)
        self.assertTrue(
            any(2 * b < d for b, d in result.diagrams[1].finite_pairs),
            f"no pair with 2a < b in {result.diagrams[1].pairs}",
        )
        pair, index = select_class(result.diagrams[1])
        cocycle = result.cocycles[index]
        cfg = LensMapConfig.for_class(pair, 3)
        alpha = np.random.default_rng(9).integers(0, 3, size=len(landmarks))
        first = lpca(lens_coordinates(data, landmarks, cocycle, cfg)).coordinates(2)
        second = lpca(lens_coordinates(data, landmarks, cocycle.add_coboundary(alpha), cfg)).coordinates(2)
        np.testing.assert_allclose(
            lens_distance_matrix(first.reps, first.reps, 3),
            lens_distance_matrix(second.reps, second.reps, 3),
            atol=1e-6,
        )

    def test_invalid_input(self):
        with self.assertRaises(EmptyCloud):
            lpca(LensCloud(reps=np.zeros((0, 3)), q=3, source_indices=[]))
        with self.assertRaises(ValueError):
            lpca(LensCloud(reps=np.ones((4, 1)), q=3, source_indices=range(4)))


class VarianceProfileTests(SimpleTestCase):

    def test_hand_case(self):
        t = 0.3
        var, pvar = variance_profile(np.array([[np.cos(t), np.sin(t)]], dtype=complex), np.eye(2))
        self.assertEqual(var[0], 0.0)
        self.assertAlmostEqual(var[1], (np.pi / 2 - t) ** 2, places=12)
        np.testing.assert_array_equal(pvar, [0.0, 1.0])


class ChooseDimTests(SimpleTestCase):
    profile = [0.62, 0.75, 0.81, 0.86, 0.89, 1.0]

    def test_threshold(self):
        self.assertEqual(choose_dim(self.profile, tau=0.75), 2)
        self.assertEqual(choose_dim(self.profile, tau=1.0), 6)
        self.assertEqual(choose_dim(self.profile, tau=0.1), 1)

    def test_gap(self):
        self.assertEqual(choose_dim(self.profile, gamma=10.0), 1)
        self.assertEqual(choose_dim(self.profile, gamma=0.04), 4)
        self.assertEqual(choose_dim(self.profile, gamma=-1.0), 6)

    def test_exactly_one_rule(self):
        with self.assertRaises(ValueError):
            choose_dim(self.profile)
        with self.assertRaises(ValueError):
            choose_dim(self.profile, tau=0.5, gamma=0.1)

    def test_table_row(self):
        row = variance_table_row([0.623456, 0.75])
        self.assertEqual(list(row), ['Dim 1', 'Dim 2', 'Dim 3', 'Dim 4', 'Dim 5'])
        self.assertEqual(row['Dim 1'], 0.6235)
        self.assertIsNone(row['Dim 3'])


class LpcaCommandTests(SimpleTestCase):

    def test_writes_result_and_coordinates(self):
        cloud = random_cloud(60, 4, seed=12)
        expected = lpca(cloud)
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            save_cloud(cloud, tmp / 'cloud.json')
            call_command('lpca', cloud=str(tmp / 'cloud.json'), out=str(tmp / 'lpca.json'),
                         coords=[1, 2], tau=0.99, stdout=StringIO())
            result = load_lpca(tmp / 'lpca.json')
            payload = read_json(tmp / 'lpca.json')
        np.testing.assert_allclose(result.components, expected.components, atol=1e-15)
        np.testing.assert_allclose(result.pvar, expected.pvar, atol=1e-15)
        np.testing.assert_allclose(result.coords[2].reps, expected.coordinates(2).reps, atol=1e-15)
        self.assertEqual(payload['target_dim'], choose_dim(expected.reported_pvar, tau=0.99))
        self.assertIn(str(payload['target_dim']), payload['coords'])
        self.assertEqual(payload['reported_pvar'], expected.reported_pvar)

    def test_dimension_out_of_range(self):
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            save_cloud(random_cloud(20, 3), tmp / 'cloud.json')
            with self.assertRaises(CommandError) as ctx:
                call_command('lpca', cloud=str(tmp / 'cloud.json'), out=str(tmp / 'lpca.json'),
                             coords=[7], stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)
