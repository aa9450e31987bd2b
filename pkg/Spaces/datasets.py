"""
MetricDataset: a finite point set together with the distance oracle it was sampled for.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from django.conf import settings
from joblib import Parallel, delayed

from .metrics import METRIC_IDS, euclidean_block, lens_block, moore_block

logger = logging.getLogger(__name__)

ROW_CHUNK = 512


@dataclass
class MetricDataset:
    """
    points: euclidean -> (N, d) float array; moore -> (N,) complex array (disc model);
            lens -> (N, n) complex array of unit representatives.
    Self-distances are pinned to 0 in every block, so dissimilarities that are not
    zero on the diagonal still give valid filtration input.
    """
    points: np.ndarray
    metric_id: str
    seed: Optional[int] = None
    q: Optional[int] = None
    metadata: Dict = field(default_factory=dict)
    _full_matrix: Optional[np.ndarray] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.metric_id not in METRIC_IDS:
            raise ValueError(f"Unknown metric '{self.metric_id}', expected one of {METRIC_IDS}")
        if self.metric_id == 'lens' and (self.q is None or self.q < 2):
            raise ValueError("Lens datasets need a modulus q >= 2")
        dtype = float if self.metric_id == 'euclidean' else complex
        self.points = np.asarray(self.points, dtype=dtype)
        if self.metric_id == 'euclidean' and self.points.ndim == 1:
            self.points = self.points[:, None]
        if self.metric_id == 'moore':
            self.points = self.points.reshape(-1)

    def __len__(self):
        return self.points.shape[0]

    # ------------------------------------------------------------------
    # Distances
    # ------------------------------------------------------------------

    def _metric_block(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        if self.metric_id == 'euclidean':
            return euclidean_block(rows, cols)
        if self.metric_id == 'moore':
            return moore_block(rows, cols)
        return lens_block(rows, cols, self.q)

    def block(self, row_indices: Sequence[int], col_indices: Sequence[int]) -> np.ndarray:
        """Distances between two index lists, filled in row chunks across LENS_THREADS threads."""
        row_indices = np.asarray(row_indices, dtype=int)
        col_indices = np.asarray(col_indices, dtype=int)
        if self._full_matrix is not None:
            return self._full_matrix[np.ix_(row_indices, col_indices)]

        cols = self.points[col_indices]
        chunks = [row_indices[i:i + ROW_CHUNK] for i in range(0, row_indices.size, ROW_CHUNK)]
        if not chunks:
            return np.zeros((0, col_indices.size))
        if len(chunks) == 1:
            parts = [self._metric_block(self.points[chunks[0]], cols)]
        else:
            parts = Parallel(n_jobs=settings.LENS_THREADS, prefer='threads')(
                delayed(self._metric_block)(self.points[chunk], cols) for chunk in chunks
            )
        result = np.vstack(parts)
        result[row_indices[:, None] == col_indices[None, :]] = 0.0
        return result

    def distances_to(self, indices: Sequence[int]) -> np.ndarray:
        """(N, len(indices)) distances from every point to the given points."""
        return self.block(np.arange(len(self)), indices)

    def distance(self, i: int, j: int) -> float:
        return float(self.block([i], [j])[0, 0])

    def distance_matrix(self) -> np.ndarray:
        """Full pairwise matrix, symmetrized; cached when the dataset is under the size cap."""
        if self._full_matrix is not None:
            return self._full_matrix
        if len(self) > settings.LENS_DISTANCE_MATRIX_CAP:
            raise ValueError(
                f"Dataset of {len(self)} points exceeds LENS_DISTANCE_MATRIX_CAP="
                f"{settings.LENS_DISTANCE_MATRIX_CAP}; use block() / distances_to() instead"
            )
        indices = np.arange(len(self))
        matrix = self.block(indices, indices)
        matrix = 0.5 * (matrix + matrix.T)
        self._full_matrix = matrix
        return matrix

    def subset(self, indices: Sequence[int]) -> 'MetricDataset':
        indices = np.asarray(indices, dtype=int)
        return MetricDataset(
            points=self.points[indices].copy(),
            metric_id=self.metric_id,
            seed=self.seed,
            q=self.q,
            metadata={'parent_indices': indices.tolist()},
        )

    # ------------------------------------------------------------------
    # Flat float rows for the JSON document
    # ------------------------------------------------------------------

    @property
    def point_rows(self) -> List[List[float]]:
        if self.metric_id == 'euclidean':
            return self.points.tolist()
        if self.metric_id == 'moore':
            return np.column_stack([self.points.real, self.points.imag]).tolist()
        interleaved = np.empty((len(self), 2 * self.points.shape[1]))
        interleaved[:, 0::2] = self.points.real
        interleaved[:, 1::2] = self.points.imag
        return interleaved.tolist()

    @classmethod
    def from_rows(cls, rows, metric_id: str, seed=None, q=None, metadata=None) -> 'MetricDataset':
        rows = np.asarray(rows, dtype=float)
        if rows.ndim == 1:
            rows = rows[:, None]
        if metric_id == 'euclidean':
            points = rows
        elif metric_id == 'moore':
            points = rows[:, 0] + 1j * rows[:, 1]
        else:
            points = rows[:, 0::2] + 1j * rows[:, 1::2]
        return cls(points=points, metric_id=metric_id, seed=seed, q=q, metadata=metadata or {})
