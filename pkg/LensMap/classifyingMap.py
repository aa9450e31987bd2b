"""
The classifying map f: L^epsilon -> L_q^n built from a landmark cover and a Z_q cocycle.

For a point b within epsilon of landmark l_j,

    f(b) = [ sqrt(phi_1(b)) zeta^{eta_j1} : ... : sqrt(phi_n(b)) zeta^{eta_jn} ]

where phi is the partition of unity subordinate to the epsilon-balls. Another admissible
chart j' changes every coordinate by the same power of zeta, so the class is well defined.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from joblib import Parallel, delayed

from core.errors import EXIT_CONFIG_ERROR, EXIT_COVERAGE_FAILURE
from Geometry.lensSpace import UNIT_TOLERANCE, LensPoint, roots_of_unity
from Landmarks.selection import LandmarkSet
from Persistence.cohomology import Cocycle
from Spaces.datasets import MetricDataset

logger = logging.getLogger(__name__)

DEFAULT_DELTA = 1e-5
POINT_CHUNK = 1024


class Uncovered(RuntimeError):
    """The point lies in no epsilon-ball around a landmark."""


class MissingEdge(RuntimeError):
    """Two landmarks share a point but their edge has no cocycle value."""


class CoverageFailure(RuntimeError):
    exit_code = EXIT_COVERAGE_FAILURE

    def __init__(self, uncovered: Sequence[int], epsilon: float):
        self.uncovered = list(uncovered)
        self.epsilon = epsilon
        preview = ', '.join(str(i) for i in self.uncovered[:10])
        more = ', ...' if len(self.uncovered) > 10 else ''
        super().__init__(
            f"{len(self.uncovered)} points are farther than epsilon={epsilon:.6g} from every landmark "
            f"({preview}{more})"
        )


class InvalidScale(ValueError):
    exit_code = EXIT_CONFIG_ERROR


@dataclass
class LensMapConfig:
    epsilon: float
    q: int
    delta: float = DEFAULT_DELTA
    chart_rule: str = 'nearest'

    @classmethod
    def for_class(cls, pair: Tuple[float, float], q: int, delta: float = DEFAULT_DELTA) -> 'LensMapConfig':
        """epsilon = a + min(delta, (b/2 - a)/2), which keeps a <= epsilon < b/2."""
        birth, death = pair
        if not death / 2 > birth:
            raise InvalidScale(f"Class ({birth}, {death}) does not satisfy 2a < b")
        return cls(epsilon=birth + min(delta, (death / 2 - birth) / 2), q=q, delta=delta)

    def validate(self, cocycle: Optional[Cocycle] = None):
        if not self.epsilon > 0:
            raise InvalidScale(f"epsilon must be positive, got {self.epsilon}")
        if self.chart_rule != 'nearest':
            raise InvalidScale(f"Unknown chart rule '{self.chart_rule}'")
        if cocycle is None:
            return
        if cocycle.q != self.q:
            raise InvalidScale(f"Cocycle over Z_{cocycle.q} used with q={self.q}")
        if not 2 * self.epsilon < cocycle.valid_below:
            raise InvalidScale(
                f"2 * epsilon = {2 * self.epsilon:.6g} is not below the class death {cocycle.valid_below:.6g}"
            )
        if cocycle.birth is not None and self.epsilon < cocycle.birth:
            raise InvalidScale(f"epsilon = {self.epsilon:.6g} is below the class birth {cocycle.birth:.6g}")


@dataclass
class LensCloud:
    """N representatives (rows) of classes in L_q^n, with the dataset index each came from."""
    reps: np.ndarray
    q: int
    source_indices: List[int]
    coverage: Dict = field(default_factory=dict)

    def __post_init__(self):
        self.reps = np.atleast_2d(np.asarray(self.reps, dtype=complex))
        self.source_indices = [int(i) for i in self.source_indices]

    def __len__(self):
        return self.reps.shape[0]

    @property
    def n(self) -> int:
        return self.reps.shape[1]

    @property
    def points(self) -> List[LensPoint]:
        return [LensPoint(rep, self.q) for rep in self.reps]

    @property
    def point_pairs(self) -> List[List[List[float]]]:
        return np.stack([self.reps.real, self.reps.imag], axis=-1).tolist()

    def validate(self, chart_entries: bool = False):
        if len(self.source_indices) != len(self):
            raise ValueError("source_indices does not match the number of points")
        norms = np.linalg.norm(self.reps, axis=1)
        if np.any(np.abs(norms - 1.0) >= UNIT_TOLERANCE):
            raise ValueError(f"Lens cloud has non-unit rows (worst {np.abs(norms - 1.0).max():.3g})")
        if chart_entries:
            positive_real = (np.abs(self.reps.imag) < UNIT_TOLERANCE) & (self.reps.real > 0)
            if not np.all(positive_real.any(axis=1)):
                raise ValueError("Some points have no positive real chart coordinate")


def partition_of_unity(distances, epsilon: float) -> np.ndarray:
    """
    phi_l = max(epsilon - d_l, 0) / sum_l' max(epsilon - d_l', 0), row-wise for 2-d input.
    """
    d = np.asarray(distances, dtype=float)
    bumps = np.maximum(epsilon - d, 0.0)
    totals = bumps.sum(axis=-1, keepdims=True)
    if np.any(totals == 0):
        raise Uncovered(f"Point farther than epsilon={epsilon} from every landmark")
    return bumps / totals


def _chart_entries(weights: np.ndarray, charts: np.ndarray, values: np.ndarray, zetas: np.ndarray) -> np.ndarray:
    # clamp -0.0 before the square root
    reps = np.sqrt(np.maximum(weights, 0.0)) * zetas[values[charts]]
    return reps / np.linalg.norm(reps, axis=1, keepdims=True)


def classify(distances, cocycle: Cocycle, cfg: LensMapConfig, chart: Optional[int] = None) -> LensPoint:
    """
    f(x) for one point, from its distances to the landmarks. The chart defaults to the
    nearest landmark; any landmark within epsilon may be passed instead.
    """
    d = np.asarray(distances, dtype=float).reshape(-1)
    weights = partition_of_unity(d, cfg.epsilon)
    if chart is None:
        chart = int(np.argmin(d))
    elif not d[chart] < cfg.epsilon:
        raise Uncovered(f"Chart {chart} does not contain the point")

    rep = np.zeros(d.size, dtype=complex)
    zetas = roots_of_unity(cfg.q)
    for k in np.flatnonzero(weights > 0):
        try:
            power = cocycle.value(chart, int(k))
        except KeyError:
            raise MissingEdge(f"Edge ({chart}, {k}) carries no cocycle value")
        rep[k] = np.sqrt(weights[k]) * zetas[power % cfg.q]
    return LensPoint(rep / np.linalg.norm(rep), cfg.q)


def coverage_statistics(distances: np.ndarray, epsilon: float) -> Dict:
    """Ball multiplicities and the worst partition-of-unity normalisation error."""
    covered = distances < epsilon
    multiplicity = covered.sum(axis=1)
    weights = partition_of_unity(distances, epsilon)
    return {
        'epsilon': float(epsilon),
        'min_multiplicity': int(multiplicity.min()),
        'mean_multiplicity': float(multiplicity.mean()),
        'max_multiplicity': int(multiplicity.max()),
        'partition_error': float(np.abs(weights.sum(axis=1) - 1.0).max()),
    }


def lens_coordinates(dataset: MetricDataset, landmarks: LandmarkSet, cocycle: Cocycle,
                     cfg: LensMapConfig) -> LensCloud:
    """f(X): one Lens representative per dataset point, charts by nearest landmark."""
    cfg.validate(cocycle)
    distances = dataset.distances_to(landmarks.indices)
    uncovered = np.flatnonzero(distances.min(axis=1) >= cfg.epsilon)
    if uncovered.size:
        logger.error(f"Coverage check failed: {uncovered.size} of {len(dataset)} points uncovered")
        raise CoverageFailure(uncovered.tolist(), cfg.epsilon)

    weights = partition_of_unity(distances, cfg.epsilon)
    charts = np.argmin(distances, axis=1)
    values, mask = cocycle.as_matrix(len(landmarks))

    missing = (weights > 0) & ~mask[charts]
    if missing.any():
        point, landmark = np.argwhere(missing)[0]
        raise MissingEdge(
            f"Point {point} is covered by landmarks {charts[point]} and {landmark}, "
            f"but that edge carries no cocycle value"
        )

    zetas = roots_of_unity(cfg.q)
    chunks = [np.arange(i, min(i + POINT_CHUNK, len(dataset))) for i in range(0, len(dataset), POINT_CHUNK)]
    if len(chunks) == 1:
        reps = _chart_entries(weights, charts, values, zetas)
    else:
        parts = Parallel(n_jobs=settings.LENS_THREADS, prefer='threads')(
            delayed(_chart_entries)(weights[chunk], charts[chunk], values, zetas) for chunk in chunks
        )
        reps = np.vstack(parts)

    stats = coverage_statistics(distances, cfg.epsilon)
    cloud = LensCloud(reps=reps, q=cfg.q, source_indices=list(range(len(dataset))), coverage=stats)
    cloud.validate(chart_entries=True)
    logger.info(
        f"Lens coordinates for {len(cloud)} points in L_{cfg.q}^{cloud.n} "
        f"(epsilon={cfg.epsilon:.6g}, multiplicity {stats['min_multiplicity']}-{stats['max_multiplicity']})"
    )
    return cloud
