"""
Landmark selection: greedy maxmin (optionally seeded) and uniform random subsets.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from Spaces.datasets import MetricDataset

logger = logging.getLogger(__name__)


class InvalidLandmarkRequest(ValueError):
    """Landmark count or seed indices are inconsistent with the dataset."""


@dataclass
class LandmarkSet:
    indices: List[int]
    cover_radius: float

    def __len__(self):
        return len(self.indices)

    def validate(self, dataset: MetricDataset, tol: float = 1e-9):
        """Distinct indices, and every point within cover_radius of some landmark."""
        if len(set(self.indices)) != len(self.indices):
            raise InvalidLandmarkRequest("Landmark indices are not distinct")
        if self.indices and (min(self.indices) < 0 or max(self.indices) >= len(dataset)):
            raise InvalidLandmarkRequest("Landmark index out of range")
        radius = covering_radius(dataset, self.indices)
        if abs(radius - self.cover_radius) > tol:
            raise InvalidLandmarkRequest(
                f"cover_radius {self.cover_radius} does not match the dataset ({radius})"
            )


def covering_radius(dataset: MetricDataset, indices: Sequence[int]) -> float:
    return float(dataset.distances_to(indices).min(axis=1).max())


def _check_count(dataset: MetricDataset, n: int):
    if n < 1:
        raise InvalidLandmarkRequest(f"Need at least one landmark, got {n}")
    if n > len(dataset):
        raise InvalidLandmarkRequest(f"Requested {n} landmarks from a dataset of {len(dataset)} points")


def maxmin_landmarks(dataset: MetricDataset, n: int, seeds: Optional[Sequence[int]] = None,
                     rng_seed=None) -> LandmarkSet:
    """
    Greedy maxmin selection: l_{j+1} = argmax_x min(d(x, l_1), ..., d(x, l_j)).

    Given seed indices come first in the given order; without seeds the first landmark is
    drawn with rng_seed. Ties go to the smallest index (np.argmax returns the first maximum).
    """
    _check_count(dataset, n)
    seeds = [int(s) for s in (seeds or [])]
    if len(set(seeds)) != len(seeds):
        raise InvalidLandmarkRequest(f"Duplicate seed indices in {seeds}")
    if len(seeds) > n:
        raise InvalidLandmarkRequest(f"{len(seeds)} seeds given for {n} landmarks")
    if any(s < 0 or s >= len(dataset) for s in seeds):
        raise InvalidLandmarkRequest(f"Seed indices out of range for {len(dataset)} points")

    if not seeds:
        seeds = [int(np.random.default_rng(rng_seed).integers(len(dataset)))]

    chosen = list(seeds[:n])
    running_min = dataset.distances_to(chosen).min(axis=1)
    running_min[chosen] = -np.inf

    while len(chosen) < n:
        nxt = int(np.argmax(running_min))
        chosen.append(nxt)
        running_min = np.minimum(running_min, dataset.distances_to([nxt])[:, 0])
        running_min[nxt] = -np.inf

    radius = covering_radius(dataset, chosen)
    logger.info(f"Selected {n} maxmin landmarks from {len(dataset)} points, cover radius {radius:.6g}")
    return LandmarkSet(indices=chosen, cover_radius=radius)


def random_landmarks(dataset: MetricDataset, n: int, rng_seed=None) -> LandmarkSet:
    _check_count(dataset, n)
    rng = np.random.default_rng(rng_seed)
    chosen = [int(i) for i in rng.choice(len(dataset), size=n, replace=False)]
    radius = covering_radius(dataset, chosen)
    logger.info(f"Selected {n} random landmarks, cover radius {radius:.6g}")
    return LandmarkSet(indices=chosen, cover_radius=radius)
