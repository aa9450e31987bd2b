import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from Geometry.lensSpace import DimensionMismatch, roots_of_unity
from LensMap.classifyingMap import LensCloud
from LensMap.serializers import save_cloud
from Lpca.lensPca import lpca
from Lpca.serializers import save_lpca

from .exporters import export_cloud, read_export
from .fundamentalDomain import NonUnitInput, domain_coordinates, fundamental_domain_map, map_cloud


def random_l32(n_points, seed=0):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n_points, 2)) + 1j * rng.normal(size=(n_points, 2))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


class FundamentalDomainTests(SimpleTestCase):

    def test_zero_height(self):
        z = 0.6 * np.exp(0.1j)
        point = fundamental_domain_map(z, 0.8 * np.exp(1j * np.pi / 3))
        self.assertAlmostEqual(point.x, z.real, places=12)
        self.assertAlmostEqual(point.y, z.imag, places=12)
        self.assertAlmostEqual(point.z, 0.0, places=12)

    def test_boundary_circle_is_flat(self):
        for z in (1.0, 1j, -1.0, -1j):
            point = fundamental_domain_map(z, 0.0)
            self.assertEqual(point.z, 0.0)
            self.assertAlmostEqual(np.hypot(point.x, point.y), 1.0, places=15)

    def test_second_wedge_rotates_back(self):
        z = 0.6 * np.exp(1j * (2 * np.pi / 3 + 0.2))
        point = fundamental_domain_map(z, 0.8)
        self.assertAlmostEqual(point.x, 0.6 * np.cos(0.2), places=12)
        self.assertAlmostEqual(point.y, 0.6 * np.sin(0.2), places=12)

    def test_non_unit_input(self):
        with self.assertRaises(NonUnitInput):
            fundamental_domain_map(0.5, 0.5)

    def test_constant_on_orbits(self):
        reps = random_l32(300, seed=1)
        base = domain_coordinates(reps)
        for zeta in roots_of_unity(3)[1:]:
            np.testing.assert_allclose(domain_coordinates(zeta * reps), base, atol=1e-9)

    def test_image_is_bounded(self):
        reps = random_l32(500, seed=2)
        xyz = domain_coordinates(reps)
        radius = np.hypot(xyz[:, 0], xyz[:, 1])
        np.testing.assert_allclose(radius, np.abs(reps[:, 0]), atol=1e-12)
        bound = np.pi / 3 * np.sqrt(1 - np.abs(reps[:, 0]) ** 2)
        self.assertTrue(np.all(np.abs(xyz[:, 2]) <= bound + 1e-12))
        angles = np.angle(xyz[:, 0] + 1j * xyz[:, 1]) % (2 * np.pi)
        self.assertTrue(np.all(angles < 2 * np.pi / 3 + 1e-9))
        self.assertTrue(all(fundamental_domain_map(*rep).in_domain() for rep in reps[:50]))

    def test_only_l32_clouds(self):
        cloud = LensCloud(reps=np.eye(3), q=3, source_indices=[0, 1, 2])
        with self.assertRaises(DimensionMismatch):
            map_cloud(cloud)
        with self.assertRaises(ValueError):
            domain_coordinates(random_l32(3), q=5)


class ExportTests(SimpleTestCase):

    def test_empty_cloud_is_header_only(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = export_cloud(np.zeros((0, 3)), Path(tmp) / 'empty.csv')
            self.assertEqual(path.read_text(), 'x,y,z,source_index\n')

    def test_hand_case(self):
        xyz = [[0.5, 0.25, -1.0], [2.0, 0.0, 0.125], [-0.75, 1.5, 3.0]]
        with tempfile.TemporaryDirectory() as tmp:
            path = export_cloud(xyz, Path(tmp) / 'points.csv', source_indices=[4, 0, 9])
            self.assertEqual(
                path.read_text(),
                'x,y,z,source_index\n0.5,0.25,-1,4\n2,0,0.125,0\n-0.75,1.5,3,9\n',
            )

    def test_read_back(self):
        xyz = domain_coordinates(random_l32(50, seed=3))
        with tempfile.TemporaryDirectory() as tmp:
            for name, fmt in (('points.csv', 'csv'), ('points.json', 'json')):
                frame = read_export(export_cloud(xyz, Path(tmp) / name, fmt=fmt))
                self.assertEqual(list(frame.columns), ['x', 'y', 'z', 'source_index'])
                np.testing.assert_array_equal(frame[['x', 'y', 'z']].to_numpy(), xyz)
                np.testing.assert_array_equal(frame['source_index'].to_numpy(), np.arange(50))

    def test_identical_inputs_give_identical_bytes(self):
        xyz = domain_coordinates(random_l32(20, seed=4))
        with tempfile.TemporaryDirectory() as tmp:
            first = export_cloud(xyz, Path(tmp) / 'a.csv').read_bytes()
            second = export_cloud(xyz.copy(), Path(tmp) / 'b.csv').read_bytes()
        self.assertEqual(first, second)


class VizCommandTests(SimpleTestCase):

    def test_lpca_coordinates_to_csv(self):
        reps = random_l32(40, seed=5)
        cloud = LensCloud(reps=np.hstack([reps, np.zeros((40, 1))]), q=3, source_indices=range(40))
        result = lpca(cloud)
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            save_lpca(result, tmp / 'lpca.json', coord_dims=[2])
            call_command('viz', lpca=str(tmp / 'lpca.json'), out=str(tmp / 'domain.csv'), stdout=StringIO())
            frame = read_export(tmp / 'domain.csv')
        expected = domain_coordinates(result.coordinates(2).reps)
        np.testing.assert_allclose(frame[['x', 'y', 'z']].to_numpy(), expected, atol=1e-15)

    def test_cloud_in_wrong_dimension(self):
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            save_cloud(LensCloud(reps=np.eye(3), q=3, source_indices=[0, 1, 2]), tmp / 'cloud.json')
            with self.assertRaises(CommandError) as ctx:
                call_command('viz', cloud=str(tmp / 'cloud.json'), out=str(tmp / 'domain.csv'), stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)
