import tempfile
from io import StringIO
from itertools import combinations
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, tag
from scipy.spatial.distance import cdist

from Landmarks.selection import maxmin_landmarks
from Landmarks.serializers import save_landmarks
from Spaces.samplers import sample_circle, sample_lens, sample_moore
from Spaces.serializers import save_dataset

from .cohomology import NotPrime, PersistenceDiagram, persistent_cohomology
from .diagrams import EmptyDiagram, NoAdmissibleClass, dominant_persistence, per_ratio, select_class
from .rips import AsymmetricInput, build_rips, landmark_distances
from .serializers import load_cocycles, load_diagrams

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def rank_mod_q(matrix, q):
    M = np.array(matrix, dtype=np.int64) % q
    if M.size == 0:
        return 0
    rows, cols = M.shape
    rank = 0
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if M[r, c]), None)
        if pivot is None:
            continue
        M[[rank, pivot]] = M[[pivot, rank]]
        M[rank] = (M[rank] * pow(int(M[rank, c]), q - 2, q)) % q
        for r in range(rows):
            if r != rank and M[r, c]:
                M[r] = (M[r] - M[r, c] * M[rank]) % q
        rank += 1
        if rank == rows:
            break
    return rank


class BettiSweep:
    """Persistent Betti numbers of the closed sublevel complexes diam <= s, by dense elimination."""

    def __init__(self, D, q):
        self.q = q
        self.n = D.shape[0]
        self.edges = list(combinations(range(self.n), 2))
        self.edge_diam = np.array([D[a, b] for a, b in self.edges])
        self.triangles = list(combinations(range(self.n), 3))
        self.tri_diam = np.array([max(D[a, b], D[a, c], D[b, c]) for a, b, c in self.triangles])
        edge_row = {e: i for i, e in enumerate(self.edges)}

        self.d1 = np.zeros((self.n, len(self.edges)), dtype=np.int64)
        for col, (a, b) in enumerate(self.edges):
            self.d1[b, col] += 1
            self.d1[a, col] -= 1
        self.d2 = np.zeros((len(self.edges), len(self.triangles)), dtype=np.int64)
        for col, (a, b, c) in enumerate(self.triangles):
            self.d2[edge_row[(b, c)], col] += 1
            self.d2[edge_row[(a, c)], col] -= 1
            self.d2[edge_row[(a, b)], col] += 1

        self.scales = np.unique(np.concatenate([[0.0], self.edge_diam]))
        self._ranks = {}

    def _rank(self, key, matrix):
        if key not in self._ranks:
            self._ranks[key] = rank_mod_q(matrix, self.q)
        return self._ranks[key]

    def beta0(self, s, t):
        return self.n - self._rank(('d1', t), self.d1[:, self.edge_diam <= t])

    def beta1(self, s, t):
        in_s = self.edge_diam <= s
        cycles = int(in_s.sum()) - self._rank(('d1', s), self.d1[:, in_s])
        d2_t = self.d2[:, self.tri_diam <= t]
        bounding = self._rank(('d2', t), d2_t) - rank_mod_q(d2_t[~in_s], self.q)
        return cycles - bounding


def alive(dgm, s, t):
    return sum(1 for b, d in dgm.pairs if b <= s and d > t)


class BuildRipsTests(SimpleTestCase):

    def test_equilateral_triangle(self):
        D = np.ones((3, 3)) - np.eye(3)
        complex_ = build_rips(D, max_dim=2, max_diameter=2)
        self.assertEqual(complex_.of_dim(2), [((0, 1, 2), 1.0)])
        complex_.validate()

    def test_zero_max_diameter_keeps_vertices(self):
        D = np.ones((3, 3)) - np.eye(3)
        complex_ = build_rips(D, max_dim=2, max_diameter=0)
        self.assertEqual(complex_.simplices, [((0,), 0.0), ((1,), 0.0), ((2,), 0.0)])

    def test_square_triangles_enter_with_diagonals(self):
        complex_ = build_rips(cdist(SQUARE, SQUARE), max_dim=2)
        triangles = complex_.of_dim(2)
        self.assertEqual(len(triangles), 4)
        for _, diameter in triangles:
            self.assertEqual(diameter, np.sqrt(2))

    def test_strict_diameter_bound(self):
        complex_ = build_rips(cdist(SQUARE, SQUARE), max_dim=2, max_diameter=np.sqrt(2))
        self.assertEqual(len(complex_.of_dim(1)), 4)
        self.assertEqual(complex_.of_dim(2), [])

    def test_tetrahedra_when_requested(self):
        D = np.ones((5, 5)) - np.eye(5)
        self.assertEqual(len(build_rips(D, max_dim=3).of_dim(3)), 5)

    def test_asymmetric_input(self):
        D = np.array([[0.0, 1.0], [2.0, 0.0]])
        with self.assertRaises(AsymmetricInput):
            build_rips(D)

    def test_filtration_order(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(9, 2))
        build_rips(cdist(X, X), max_dim=3).validate()


class PersistentCohomologyTests(SimpleTestCase):

    def test_square(self):
        result = persistent_cohomology(build_rips(cdist(SQUARE, SQUARE), max_dim=2), 3)
        self.assertEqual(len(result.diagrams[1]), 1)
        birth, death = result.diagrams[1].pairs[0]
        self.assertAlmostEqual(birth, 1.0, delta=1e-12)
        self.assertAlmostEqual(death, np.sqrt(2), delta=1e-12)
        self.assertEqual(sorted(result.diagrams[0].pairs), [(0.0, 1.0)] * 3 + [(0.0, np.inf)])

    def test_square_cocycle_is_nontrivial_on_the_loop(self):
        result = persistent_cohomology(build_rips(cdist(SQUARE, SQUARE), max_dim=2), 3)
        eta = result.cocycles[0]
        self.assertEqual(eta.valid_below, np.sqrt(2))
        self.assertEqual(sorted(eta.values), [(0, 1), (0, 3), (1, 2), (2, 3)])
        loop = eta.value(0, 1) + eta.value(1, 2) + eta.value(2, 3) + eta.value(3, 0)
        self.assertNotEqual(loop % 3, 0)

    def test_single_point(self):
        result = persistent_cohomology(build_rips(np.zeros((1, 1))), 3)
        self.assertEqual(result.diagrams[0].pairs, [(0.0, np.inf)])
        self.assertEqual(result.diagrams[1].pairs, [])
        self.assertEqual(result.cocycles, [])

    def test_full_skeleton_has_no_loops(self):
        for n in range(2, 7):
            D = np.ones((n, n)) - np.eye(n)
            result = persistent_cohomology(build_rips(D), 5)
            self.assertEqual(result.diagrams[1].pairs, [])

    def test_composite_modulus(self):
        with self.assertRaises(NotPrime):
            persistent_cohomology(build_rips(np.zeros((1, 1))), 4)

    def test_matches_betti_sweep(self):
        rng = np.random.default_rng(2024)
        for trial in range(50):
            n = int(rng.integers(3, 9))
            X = rng.uniform(size=(n, 2))
            D = cdist(X, X)
            complex_ = build_rips(D, max_dim=2)
            for q in (2, 3, 5):
                result = persistent_cohomology(complex_, q)
                sweep = BettiSweep(D, q)
                for i, s in enumerate(sweep.scales):
                    for t in sweep.scales[i:]:
                        self.assertEqual(alive(result.diagrams[0], s, t), sweep.beta0(s, t), (trial, q, s, t))
                        self.assertEqual(alive(result.diagrams[1], s, t), sweep.beta1(s, t), (trial, q, s, t))

    def test_dim0_is_field_independent(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(12, 2))
        complex_ = build_rips(cdist(X, X))
        self.assertEqual(
            persistent_cohomology(complex_, 2).diagrams[0].pairs,
            persistent_cohomology(complex_, 3).diagrams[0].pairs,
        )

    def test_cocycles_satisfy_cocycle_condition(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            X = rng.normal(size=(14, 2))
            complex_ = build_rips(cdist(X, X))
            for q in (2, 3, 5):
                result = persistent_cohomology(complex_, q)
                self.assertEqual(len(result.cocycles), len(result.diagrams[1]))
                for eta in result.cocycles:
                    self.assertEqual(eta.violations(complex_), [])
                    alpha = rng.integers(0, q, size=complex_.n_vertices)
                    self.assertEqual(eta.add_coboundary(alpha).violations(complex_), [])

    def test_circle_has_one_dominant_admissible_class(self):
        data = sample_circle(200, 0.05, seed=0)
        landmarks = maxmin_landmarks(data, 15, seeds=[0])
        complex_ = build_rips(landmark_distances(data, landmarks.indices))
        result = persistent_cohomology(complex_, 3)
        (birth, death), index = select_class(result.diagrams[1])
        self.assertLess(2 * birth, death)
        self.assertEqual(result.cocycles[index].violations(complex_), [])
        self.assertGreater(per_ratio(result.diagrams[1]), 1.0)

    def test_cocycles_on_moore_and_lens_landmarks(self):
        moore = sample_moore(400, seed=1, n_boundary=10)
        lens = sample_lens(400, 3, seed=1)
        for data, seeds in ((moore, moore.metadata['boundary_indices']), (lens, None)):
            landmarks = maxmin_landmarks(data, 25, seeds=seeds, rng_seed=1)
            complex_ = build_rips(landmark_distances(data, landmarks.indices))
            for q in (2, 3):
                result = persistent_cohomology(complex_, q)
                self.assertEqual(len(result.cocycles), len(result.diagrams[1]))
                for eta in result.cocycles:
                    self.assertEqual(eta.violations(complex_), [], (data.metric_id, q))

    def test_second_cohomology_of_the_octahedron(self):
        X = np.vstack([np.eye(3), -np.eye(3)])
        complex_ = build_rips(cdist(X, X), max_dim=3)
        result = persistent_cohomology(complex_, 3)
        self.assertEqual(sorted(result.diagrams), [0, 1, 2])
        self.assertEqual(result.diagrams[1].pairs, [])
        self.assertEqual(result.diagrams[2].pairs, [(np.sqrt(2), 2.0)])


class DiagramStatisticsTests(SimpleTestCase):

    def test_select_class(self):
        dgm = PersistenceDiagram(dim=1, pairs=[(1, 3), (0.5, 0.8)])
        self.assertEqual(select_class(dgm), ((1.0, 3.0), 0))

    def test_no_admissible_class(self):
        with self.assertRaises(NoAdmissibleClass):
            select_class(PersistenceDiagram(dim=1, pairs=[(1, 1.5)]))
        with self.assertRaises(NoAdmissibleClass):
            select_class(PersistenceDiagram(dim=1))

    def test_per_ratio(self):
        self.assertEqual(per_ratio(PersistenceDiagram(dim=1, pairs=[(0, 2), (0, 1)])), 2.0)
        self.assertEqual(per_ratio(PersistenceDiagram(dim=1, pairs=[(0, 2)])), np.inf)
        self.assertEqual(per_ratio(PersistenceDiagram(dim=0, pairs=[(0, 2), (0, np.inf)])), np.inf)

    def test_empty_diagram(self):
        with self.assertRaises(EmptyDiagram):
            per_ratio(PersistenceDiagram(dim=1, pairs=[(0, np.inf)]))

    def test_dominant_persistence(self):
        self.assertEqual(dominant_persistence(PersistenceDiagram(dim=1, pairs=[(1, 4), (0, 2)])), 3.0)
        self.assertEqual(dominant_persistence(PersistenceDiagram(dim=1)), 0.0)

    def test_birth_after_death_rejected(self):
        with self.assertRaises(ValueError):
            PersistenceDiagram(dim=1, pairs=[(2, 1)])


class PersistenceCommandTests(SimpleTestCase):

    def test_writes_diagrams_and_cocycles(self):
        data = sample_circle(80, 0.05, seed=3)
        landmarks = maxmin_landmarks(data, 10, seeds=[0])
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            save_dataset(data, tmp / 'data.json')
            save_landmarks(landmarks, tmp / 'landmarks.json')
            call_command('persistence', dataset=str(tmp / 'data.json'), landmarks=str(tmp / 'landmarks.json'),
                         q=[2, 3], out=str(tmp / 'ph'), stdout=StringIO())
            diagrams = load_diagrams(tmp / 'ph' / 'diagrams_q3.json')
            cocycles = load_cocycles(tmp / 'ph' / 'cocycles_q3.json')
            self.assertTrue((tmp / 'ph' / 'diagrams_q2.json').exists())

        complex_ = build_rips(landmark_distances(data, landmarks.indices))
        expected = persistent_cohomology(complex_, 3)
        self.assertEqual(diagrams[0].pairs, expected.diagrams[0].pairs)
        self.assertEqual(diagrams[1].pairs, expected.diagrams[1].pairs)
        self.assertEqual([c.values for c in cocycles], [c.values for c in expected.cocycles])

    def test_composite_modulus_is_config_error(self):
        data = sample_circle(20, 0.0, seed=0)
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            save_dataset(data, tmp / 'data.json')
            save_landmarks(maxmin_landmarks(data, 5, seeds=[0]), tmp / 'landmarks.json')
            with self.assertRaises(CommandError) as ctx:
                call_command('persistence', dataset=str(tmp / 'data.json'), landmarks=str(tmp / 'landmarks.json'),
                             q=[4], out=str(tmp / 'ph'), stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)


@tag('slow')
class LensTorsionTests(SimpleTestCase):

    def test_torsion_class_appears_only_over_z3(self):
        data = sample_lens(3000, 3, seed=0)
        landmarks = maxmin_landmarks(data, 70, rng_seed=0)
        complex_ = build_rips(landmark_distances(data, landmarks.indices))
        z2 = persistent_cohomology(complex_, 2).diagrams[1]
        z3 = persistent_cohomology(complex_, 3).diagrams[1]
        self.assertGreater(dominant_persistence(z3), 0.2)
        self.assertGreater(dominant_persistence(z3), 1.5 * dominant_persistence(z2))
        # at 70 landmarks the Z_3 class is born after half its death
        with self.assertRaises(NoAdmissibleClass):
            select_class(z3)
