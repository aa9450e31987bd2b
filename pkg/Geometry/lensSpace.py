"""
Complex linear algebra and the metric of the Lens space L_q^n = S^{2n-1} / Z_q.

Points of C^n are plain 1-d complex numpy arrays. A class in L_q^n is carried as a
LensPoint: one unit representative plus the modulus q of the acting group, so that
comparing points built for different q is caught instead of silently computed.
"""

import logging
from dataclasses import dataclass
from typing import List

import numpy as np

logger = logging.getLogger(__name__)

UNIT_TOLERANCE = 1e-12


class DimensionMismatch(ValueError):
    """Vectors or Lens points of different length / modulus were combined."""


class NotSquare(ValueError):
    """A matrix operation received a non-square input."""


def as_cvec(entries) -> np.ndarray:
    vec = np.asarray(entries, dtype=complex).reshape(-1)
    if vec.size == 0:
        raise ValueError("A complex vector needs at least one entry")
    if not np.all(np.isfinite(vec)):
        raise ValueError("Complex vector has non-finite entries")
    return vec


def roots_of_unity(q: int) -> np.ndarray:
    """zeta_q^g for g = 0..q-1."""
    return np.exp(2j * np.pi * np.arange(q) / q)


@dataclass(frozen=True)
class LensPoint:
    """A class [rep] in L_q^n, where rep is any unit vector of the orbit."""
    rep: np.ndarray
    q: int

    def __post_init__(self):
        rep = as_cvec(self.rep)
        if int(self.q) < 2:
            raise ValueError(f"Lens modulus must be >= 2, got {self.q}")
        if abs(np.linalg.norm(rep) - 1.0) >= UNIT_TOLERANCE:
            raise ValueError(f"Lens representative must have unit norm, got {np.linalg.norm(rep)!r}")
        object.__setattr__(self, 'rep', rep)
        object.__setattr__(self, 'q', int(self.q))

    @classmethod
    def from_vector(cls, vector, q: int) -> 'LensPoint':
        """Normalize an arbitrary nonzero vector into a Lens point."""
        vec = as_cvec(vector)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("Cannot normalize the zero vector")
        return cls(vec / norm, q)

    @property
    def dim(self) -> int:
        return self.rep.size

    def rotated(self, g: int) -> 'LensPoint':
        """The same class, represented by zeta_q^g * rep."""
        return LensPoint(self.rep * roots_of_unity(self.q)[g % self.q], self.q)

    def class_equal(self, other: 'LensPoint', tol: float = 1e-9) -> bool:
        return lens_distance(self, other) < tol


@dataclass(frozen=True)
class HermitianEig:
    """Eigenvalues ascending; column i of `vectors` belongs to eigenvalue i."""
    eigenvalues: np.ndarray
    vectors: np.ndarray

    @property
    def eigenvectors(self) -> List[np.ndarray]:
        return [self.vectors[:, i] for i in range(self.vectors.shape[1])]


def real_inner(x, y) -> float:
    """Re <x, y>_C with <x, y> = sum_k x_k conj(y_k)."""
    x, y = as_cvec(x), as_cvec(y)
    if x.size != y.size:
        raise DimensionMismatch(f"Inner product of vectors of length {x.size} and {y.size}")
    return float(np.real(np.vdot(y, x)))


def sphere_distance(x, y) -> float:
    """
    Great-circle distance between unit vectors, equal to arccos(real_inner(x, y)).

    The half-angle form 2*atan2(|x-y|, |x+y|) stays accurate for nearly equal and
    nearly antipodal points, where arccos loses about half the significant digits.
    """
    return float(2.0 * np.arctan2(np.linalg.norm(x - y), np.linalg.norm(x + y)))


def _check_compatible(a: LensPoint, b: LensPoint):
    if a.q != b.q:
        raise DimensionMismatch(f"Lens points live in different quotients (q={a.q} vs q={b.q})")
    if a.dim != b.dim:
        raise DimensionMismatch(f"Lens points have different dimensions ({a.dim} vs {b.dim})")


def lens_distance(a: LensPoint, b: LensPoint) -> float:
    """d_L([a], [b]) = min over g in Z_q of the sphere distance from a to zeta_q^g b."""
    _check_compatible(a, b)
    return min(sphere_distance(a.rep, zeta * b.rep) for zeta in roots_of_unity(a.q))


def hausdorff_lens_distance(a: LensPoint, b: LensPoint) -> float:
    """Hausdorff distance between the two Z_q orbits, evaluated on all q x q pairs."""
    _check_compatible(a, b)
    zetas = roots_of_unity(a.q)
    table = np.array([[sphere_distance(g * a.rep, h * b.rep) for h in zetas] for g in zetas])
    return float(max(table.min(axis=1).max(), table.min(axis=0).max()))


def lens_distance_matrix(reps_a: np.ndarray, reps_b: np.ndarray, q: int) -> np.ndarray:
    """
    Pairwise d_L between the rows of two representative arrays (N x n and M x n).

    For unit rows Re<a, zeta^g b> is maximised over g and converted to an angle with the
    half-angle form, since |a - c|^2 = 2 - 2 Re<a, c> for unit vectors.
    """
    reps_a = np.atleast_2d(np.asarray(reps_a, dtype=complex))
    reps_b = np.atleast_2d(np.asarray(reps_b, dtype=complex))
    if reps_a.shape[1] != reps_b.shape[1]:
        raise DimensionMismatch(f"Clouds of dimension {reps_a.shape[1]} and {reps_b.shape[1]}")
    gram = reps_a @ reps_b.conj().T
    best = np.full(gram.shape, -np.inf)
    for zeta in roots_of_unity(q):
        # <a, zeta b> = conj(zeta) <a, b>
        best = np.maximum(best, np.real(np.conj(zeta) * gram))
    best = np.clip(best, -1.0, 1.0)
    chord_sq = np.clip(2.0 - 2.0 * best, 0.0, 4.0)
    return 2.0 * np.arctan2(np.sqrt(chord_sq), np.sqrt(4.0 - chord_sq))


def hermitian_eig(matrix) -> HermitianEig:
    """
    Full spectral decomposition of a Hermitian matrix, eigenvalues ascending.

    The input is symmetrized as (A + A^H) / 2 first. Each eigenvector's phase is fixed
    by making its largest-modulus entry real and positive, so repeated runs agree.
    """
    A = np.asarray(matrix, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSquare(f"Expected a square matrix, got shape {A.shape}")
    A = 0.5 * (A + A.conj().T)
    eigenvalues, vectors = np.linalg.eigh(A)
    for i in range(vectors.shape[1]):
        column = vectors[:, i]
        anchor = column[np.argmax(np.abs(column))]
        if abs(anchor) > 0:
            vectors[:, i] = column * (np.conj(anchor) / abs(anchor))
    return HermitianEig(eigenvalues=eigenvalues, vectors=vectors)


def project_offspan(u, v) -> np.ndarray:
    """P_u^perp(v) = v - <v, u>_C u for a unit vector u."""
    u, v = as_cvec(u), as_cvec(v)
    if u.size != v.size:
        raise DimensionMismatch(f"Projection of length {v.size} vector off length {u.size} vector")
    return v - np.vdot(u, v) * u
