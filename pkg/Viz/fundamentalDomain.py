"""
Display map from L_3^2 into a solid region of R^3.

A class [z, w] is rotated so that arg(z) falls in the wedge [0, 2pi/3), and arg(w) taken
modulo 2pi/3 becomes the height, scaled by sqrt(1 - |z|^2) so that the height collapses on
the boundary circle |z| = 1.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from Geometry.lensSpace import DimensionMismatch, roots_of_unity
from LensMap.classifyingMap import LensCloud

logger = logging.getLogger(__name__)

DOMAIN_Q = 3
WEDGE = 2 * np.pi / DOMAIN_Q
UNIT_INPUT_TOLERANCE = 1e-9


class NonUnitInput(ValueError):
    pass


@dataclass(frozen=True)
class DomainPoint:
    x: float
    y: float
    z: float

    @property
    def xyz(self) -> Tuple[float, float, float]:
        return self.x, self.y, self.z

    def in_domain(self, tol: float = 1e-12) -> bool:
        radius = np.hypot(self.x, self.y)
        return bool(radius <= 1 + tol and abs(self.z) <= np.pi / 3 * np.sqrt(max(0.0, 1 - radius ** 2)) + tol)


def domain_coordinates(reps, q: int = DOMAIN_Q) -> np.ndarray:
    """Row-wise G(z, w) for an (N, 2) array of unit representatives; returns (N, 3)."""
    if q != DOMAIN_Q:
        raise ValueError(f"The fundamental domain map is defined for q=3 only, got q={q}")
    reps = np.atleast_2d(np.asarray(reps, dtype=complex))
    if reps.shape[1] != 2:
        raise DimensionMismatch(f"Expected points of L_3^2, got {reps.shape[1]} coordinates")
    norms_sq = np.sum(np.abs(reps) ** 2, axis=1)
    off = np.flatnonzero(np.abs(norms_sq - 1.0) > UNIT_INPUT_TOLERANCE)
    if off.size:
        raise NonUnitInput(f"{off.size} points have |z|^2 + |w|^2 != 1 (first at row {off[0]})")

    z, w = reps[:, 0], reps[:, 1]
    k = np.floor((np.angle(z) % (2 * np.pi)) / WEDGE).astype(int) % DOMAIN_Q
    planar = z * roots_of_unity(DOMAIN_Q)[(-k) % DOMAIN_Q]
    height = ((np.angle(w) % WEDGE) - np.pi / 3) * np.sqrt(np.maximum(0.0, 1.0 - np.abs(z) ** 2))
    return np.column_stack([planar.real, planar.imag, height])


def fundamental_domain_map(z: complex, w: complex, q: int = DOMAIN_Q) -> DomainPoint:
    x, y, height = domain_coordinates([[z, w]], q)[0]
    return DomainPoint(float(x), float(y), float(height))


def map_cloud(cloud: LensCloud) -> Tuple[np.ndarray, List[int]]:
    """Domain coordinates of a cloud in L_3^2, with the source index of every row."""
    if cloud.n != 2:
        raise DimensionMismatch(f"Only clouds in L_3^2 can be drawn, got L_{cloud.q}^{cloud.n}")
    xyz = domain_coordinates(cloud.reps, cloud.q)
    logger.info(f"Mapped {len(cloud)} points into the fundamental domain")
    return xyz, list(cloud.source_indices)
