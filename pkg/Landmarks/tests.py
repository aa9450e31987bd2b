import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from Spaces.datasets import MetricDataset
from Spaces.samplers import sample_circle, sample_moore
from Spaces.serializers import save_dataset

from .selection import InvalidLandmarkRequest, LandmarkSet, maxmin_landmarks, random_landmarks
from .serializers import load_landmarks


def line(values):
    return MetricDataset(points=np.asarray(values, dtype=float)[:, None], metric_id='euclidean')


class MaxminTests(SimpleTestCase):

    def test_line_example(self):
        landmarks = maxmin_landmarks(line([0, 1, 10]), 3, seeds=[0])
        self.assertEqual(landmarks.indices, [0, 2, 1])
        self.assertEqual(landmarks.cover_radius, 0.0)

    def test_all_points_is_permutation(self):
        data = sample_circle(25, 0.1, seed=1)
        landmarks = maxmin_landmarks(data, 25, rng_seed=3)
        self.assertEqual(sorted(landmarks.indices), list(range(25)))

    def test_single_seed_alone(self):
        landmarks = maxmin_landmarks(line([0, 1, 10]), 1, seeds=[1])
        self.assertEqual(landmarks.indices, [1])
        self.assertEqual(landmarks.cover_radius, 9.0)

    def test_ties_go_to_smallest_index(self):
        landmarks = maxmin_landmarks(line([-1, 0, 1]), 2, seeds=[1])
        self.assertEqual(landmarks.indices, [1, 0])

    def test_cover_radius_non_increasing(self):
        data = sample_circle(300, 0.1, seed=2)
        radii = [maxmin_landmarks(data, n, seeds=[0]).cover_radius for n in range(1, 20)]
        self.assertTrue(all(b <= a + 1e-15 for a, b in zip(radii, radii[1:])))

    def test_every_point_covered(self):
        data = sample_circle(200, 0.1, seed=4)
        landmarks = maxmin_landmarks(data, 10, rng_seed=0)
        landmarks.validate(data)
        nearest = data.distances_to(landmarks.indices).min(axis=1)
        self.assertTrue(np.all(nearest <= landmarks.cover_radius))

    def test_boundary_seeds_come_first(self):
        data = sample_moore(200, seed=0, n_boundary=10)
        seeds = data.metadata['boundary_indices']
        landmarks = maxmin_landmarks(data, 25, seeds=seeds)
        self.assertEqual(landmarks.indices[:10], seeds)
        self.assertEqual(len(set(landmarks.indices)), 25)

    def test_invalid_requests(self):
        data = line([0, 1, 10])
        with self.assertRaises(InvalidLandmarkRequest):
            maxmin_landmarks(data, 4)
        with self.assertRaises(InvalidLandmarkRequest):
            maxmin_landmarks(data, 2, seeds=[1, 1])
        with self.assertRaises(InvalidLandmarkRequest):
            maxmin_landmarks(data, 1, seeds=[0, 1])
        with self.assertRaises(InvalidLandmarkRequest):
            LandmarkSet(indices=[0, 1], cover_radius=0.5).validate(data)


class RandomLandmarkTests(SimpleTestCase):

    def test_all_indices(self):
        data = line(range(8))
        self.assertEqual(sorted(random_landmarks(data, 8, rng_seed=0).indices), list(range(8)))

    def test_zero_rejected(self):
        with self.assertRaises(InvalidLandmarkRequest):
            random_landmarks(line([0, 1]), 0)

    def test_reproducible(self):
        data = sample_circle(100, 0.0, seed=0)
        self.assertEqual(random_landmarks(data, 7, rng_seed=5).indices, random_landmarks(data, 7, rng_seed=5).indices)


class LandmarksCommandTests(SimpleTestCase):

    def test_boundary_seeded_selection(self):
        with tempfile.TemporaryDirectory() as tmp:
            dataset_path = save_dataset(sample_moore(60, seed=2, n_boundary=4), Path(tmp) / 'moore.json')
            out = Path(tmp) / 'landmarks.json'
            call_command('landmarks', dataset=str(dataset_path), landmarks=8, seed_boundary=True,
                         out=str(out), stdout=StringIO())
            landmarks = load_landmarks(out)
        self.assertEqual(landmarks.indices[:4], [60, 61, 62, 63])
        self.assertEqual(len(landmarks), 8)

    def test_too_many_landmarks_is_config_error(self):
        with tempfile.TemporaryDirectory() as tmp:
            dataset_path = save_dataset(line([0, 1, 2]), Path(tmp) / 'line.json')
            with self.assertRaises(CommandError) as ctx:
                call_command('landmarks', dataset=str(dataset_path), landmarks=5, out=str(Path(tmp) / 'l.json'))
        self.assertEqual(ctx.exception.returncode, 2)
