import numpy as np
from django.test import SimpleTestCase

from .lensSpace import (
    DimensionMismatch,
    LensPoint,
    NotSquare,
    hausdorff_lens_distance,
    hermitian_eig,
    lens_distance,
    lens_distance_matrix,
    project_offspan,
    real_inner,
    roots_of_unity,
)


def random_lens_point(rng, n, q):
    vec = rng.normal(size=n) + 1j * rng.normal(size=n)
    return LensPoint.from_vector(vec, q)


def random_hermitian(rng, n):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return A + A.conj().T


class RealInnerTests(SimpleTestCase):

    def test_orthogonal_vectors(self):
        self.assertEqual(real_inner([1, 0], [0, 1]), 0.0)

    def test_unit_self_inner(self):
        x = np.array([1, 1j]) / np.sqrt(2)
        self.assertAlmostEqual(real_inner(x, x), 1.0, places=14)

    def test_real_part_of_imaginary_inner(self):
        self.assertEqual(real_inner([1, 0], [1j, 0]), 0.0)

    def test_length_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            real_inner([1, 0], [1, 0, 0])


class LensDistanceTests(SimpleTestCase):

    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_identity(self):
        a = random_lens_point(self.rng, 3, 5)
        self.assertEqual(lens_distance(a, a), 0.0)

    def test_orthogonal_points_stay_orthogonal(self):
        a = LensPoint([1, 0], 3)
        b = LensPoint([0, 1], 3)
        self.assertAlmostEqual(lens_distance(a, b), np.pi / 2, places=12)

    def test_matches_hausdorff_definition(self):
        for _ in range(50):
            a = random_lens_point(self.rng, 4, 5)
            b = random_lens_point(self.rng, 4, 5)
            self.assertAlmostEqual(lens_distance(a, b), hausdorff_lens_distance(a, b), delta=1e-9)

    def test_mismatched_modulus_or_dimension(self):
        with self.assertRaises(DimensionMismatch):
            lens_distance(LensPoint([1, 0], 3), LensPoint([1, 0], 5))
        with self.assertRaises(DimensionMismatch):
            lens_distance(LensPoint([1, 0], 3), LensPoint([1, 0, 0], 3))

    def test_metric_axioms_on_random_triples(self):
        for _ in range(1000):
            a, b, c = (random_lens_point(self.rng, 3, 3) for _ in range(3))
            ab, bc, ac = lens_distance(a, b), lens_distance(b, c), lens_distance(a, c)
            self.assertAlmostEqual(ab, lens_distance(b, a), delta=1e-12)
            self.assertLessEqual(ac, ab + bc + 1e-9)
            self.assertGreater(ab, 1e-9)

    def test_zero_exactly_on_orbit(self):
        a = random_lens_point(self.rng, 3, 7)
        for g in range(7):
            self.assertLess(lens_distance(a, a.rotated(g)), 1e-9)
            self.assertTrue(a.class_equal(a.rotated(g)))

    def test_invariant_under_independent_rotations(self):
        for _ in range(100):
            a = random_lens_point(self.rng, 4, 5)
            b = random_lens_point(self.rng, 4, 5)
            g, h = self.rng.integers(0, 5, size=2)
            self.assertAlmostEqual(lens_distance(a, b), lens_distance(a.rotated(g), b.rotated(h)), delta=1e-12)

    def test_matrix_form_agrees_with_pointwise(self):
        points = [random_lens_point(self.rng, 3, 3) for _ in range(6)]
        reps = np.array([p.rep for p in points])
        matrix = lens_distance_matrix(reps, reps, 3)
        for i, a in enumerate(points):
            for j, b in enumerate(points):
                self.assertAlmostEqual(matrix[i, j], lens_distance(a, b), delta=1e-7)

    def test_non_unit_representative_rejected(self):
        with self.assertRaises(ValueError):
            LensPoint([1, 1], 3)
        with self.assertRaises(ValueError):
            LensPoint([1, 0], 1)


class HermitianEigTests(SimpleTestCase):

    def test_identity(self):
        eig = hermitian_eig(np.eye(3))
        np.testing.assert_allclose(eig.eigenvalues, [1, 1, 1])

    def test_diagonal(self):
        eig = hermitian_eig(np.diag([0.0, 2.0]))
        np.testing.assert_allclose(eig.eigenvalues, [0, 2], atol=1e-14)
        np.testing.assert_allclose(eig.eigenvectors[0], [1, 0], atol=1e-14)
        np.testing.assert_allclose(eig.eigenvectors[1], [0, 1], atol=1e-14)

    def test_residuals_and_reconstruction(self):
        rng = np.random.default_rng(11)
        for trial in range(100):
            n = int(rng.integers(2, 71))
            A = random_hermitian(rng, n)
            eig = hermitian_eig(A)
            scale = np.linalg.norm(A)
            for lam, v in zip(eig.eigenvalues, eig.eigenvectors):
                self.assertLess(np.linalg.norm(A @ v - lam * v), 1e-8 * scale)
            self.assertTrue(np.all(np.diff(eig.eigenvalues) >= 0))
            gram = eig.vectors.conj().T @ eig.vectors
            self.assertLess(np.max(np.abs(gram - np.eye(n))), 1e-8)
            rebuilt = eig.vectors @ np.diag(eig.eigenvalues) @ eig.vectors.conj().T
            self.assertLess(np.linalg.norm(A - rebuilt), 1e-8 * scale)

    def test_phase_convention(self):
        rng = np.random.default_rng(3)
        eig = hermitian_eig(random_hermitian(rng, 6))
        for v in eig.eigenvectors:
            anchor = v[np.argmax(np.abs(v))]
            self.assertAlmostEqual(anchor.imag, 0.0, places=12)
            self.assertGreater(anchor.real, 0.0)

    def test_non_square(self):
        with self.assertRaises(NotSquare):
            hermitian_eig(np.zeros((2, 3)))


class ProjectOffspanTests(SimpleTestCase):

    def test_orthogonal_vector_unchanged(self):
        np.testing.assert_allclose(project_offspan([1, 0], [0, 2j]), [0, 2j])

    def test_projection_of_u_vanishes(self):
        u = np.array([1, 1j]) / np.sqrt(2)
        np.testing.assert_allclose(project_offspan(u, u), [0, 0], atol=1e-15)

    def test_coordinate_projection(self):
        np.testing.assert_allclose(project_offspan([1, 0], [3, 4j]), [0, 4j])

    def test_result_orthogonal_to_u(self):
        rng = np.random.default_rng(5)
        u = rng.normal(size=4) + 1j * rng.normal(size=4)
        u /= np.linalg.norm(u)
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        self.assertLess(abs(np.vdot(u, project_offspan(u, v))), 1e-12)

    def test_roots_of_unity(self):
        zetas = roots_of_unity(3)
        np.testing.assert_allclose(zetas ** 3, np.ones(3), atol=1e-12)
