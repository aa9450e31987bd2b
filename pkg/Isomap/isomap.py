"""
Isomap baseline: k-nearest-neighbour graph, graph geodesics, classical MDS.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from django.conf import settings
from joblib import Parallel, delayed
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from core.errors import EXIT_CONFIG_ERROR
from Spaces.datasets import MetricDataset

logger = logging.getLogger(__name__)

DEFAULT_K_NEIGHBORS = 8
DEFAULT_TARGET_DIM = 2
ROW_CHUNK = 512
# stands in for a zero distance; sparse storage drops exact zeros
ZERO_EDGE = np.finfo(float).tiny


class InvalidIsomapConfig(ValueError):
    exit_code = EXIT_CONFIG_ERROR


class DisconnectedGraph(RuntimeError):

    def __init__(self, n_components: int, k_neighbors: int):
        self.n_components = n_components
        super().__init__(
            f"The {k_neighbors}-nearest-neighbour graph has {n_components} connected components; "
            f"raise --knn"
        )


@dataclass
class IsomapConfig:
    k_neighbors: int = DEFAULT_K_NEIGHBORS
    target_dim: int = DEFAULT_TARGET_DIM

    def validate(self):
        if self.k_neighbors < 1:
            raise InvalidIsomapConfig(f"k_neighbors must be >= 1, got {self.k_neighbors}")
        if self.target_dim < 1:
            raise InvalidIsomapConfig(f"target_dim must be >= 1, got {self.target_dim}")


@dataclass
class IsomapEmbedding:
    coords: np.ndarray
    eigenvalues: np.ndarray
    config: IsomapConfig = field(default_factory=IsomapConfig)

    def __len__(self):
        return self.coords.shape[0]

    @property
    def k_neighbors(self) -> int:
        return self.config.k_neighbors

    @property
    def target_dim(self) -> int:
        return self.config.target_dim

    @property
    def point_rows(self):
        return self.coords.tolist()

    def restricted(self, indices) -> np.ndarray:
        return self.coords[np.asarray(indices, dtype=int)]


def knn_graph(dataset: MetricDataset, k: int) -> csr_matrix:
    """
    Symmetric k-nearest-neighbour graph weighted by the dataset metric. Neighbours are
    ranked by (distance, index); an edge is kept when either end picked the other.
    Zero distances (duplicate points, collapsed Moore points) keep their edge with weight
    ZERO_EDGE.
    """
    n = len(dataset)
    if k > n - 1:
        logger.warning(f"k_neighbors={k} reduced to {n - 1} for {n} points")
        k = n - 1
    rows, cols, weights = [], [], []
    everything = np.arange(n)
    for start in range(0, n, ROW_CHUNK):
        chunk = everything[start:start + ROW_CHUNK]
        block = dataset.block(chunk, everything)
        block[np.arange(chunk.size), chunk] = np.inf
        order = np.argsort(block, axis=1, kind='stable')[:, :k]
        rows.append(np.repeat(chunk, k))
        cols.append(order.reshape(-1))
        picked = np.take_along_axis(block, order, axis=1).reshape(-1)
        weights.append(np.maximum(picked, ZERO_EDGE))
    graph = csr_matrix(
        (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    return graph.maximum(graph.T).tocsr()


def _dijkstra_rows(graph: csr_matrix, sources: np.ndarray) -> np.ndarray:
    return shortest_path(graph, method='D', directed=False, indices=sources)


def geodesic_distances(graph: csr_matrix, k_neighbors: int = DEFAULT_K_NEIGHBORS) -> np.ndarray:
    """All-pairs shortest paths by per-source Dijkstra, split across LENS_THREADS."""
    n_components, _ = connected_components(graph, directed=False)
    if n_components > 1:
        raise DisconnectedGraph(n_components, k_neighbors)
    n = graph.shape[0]
    chunks = [np.arange(i, min(i + ROW_CHUNK, n)) for i in range(0, n, ROW_CHUNK)]
    if len(chunks) == 1:
        return _dijkstra_rows(graph, chunks[0])
    parts = Parallel(n_jobs=settings.LENS_THREADS, prefer='threads')(
        delayed(_dijkstra_rows)(graph, chunk) for chunk in chunks
    )
    return np.vstack(parts)


def classical_mds(distances: np.ndarray, target_dim: int):
    """
    Coordinates from the top eigenpairs of B = -1/2 H D^2 H. Negative eigenvalues are
    truncated to zero; each axis is signed so its largest-modulus entry is positive.
    """
    D = np.asarray(distances, dtype=float)
    n = D.shape[0]
    H = np.eye(n) - np.ones((n, n)) / n
    B = -0.5 * H @ (D ** 2) @ H
    B = 0.5 * (B + B.T)
    eigenvalues, vectors = np.linalg.eigh(B)
    order = np.argsort(eigenvalues, kind='stable')[::-1][:target_dim]
    eigenvalues, vectors = eigenvalues[order], vectors[:, order]

    negative = eigenvalues < 0
    if negative.any():
        logger.warning(f"Classical MDS truncated {int(negative.sum())} negative eigenvalues")
        eigenvalues = np.where(negative, 0.0, eigenvalues)
    for i in range(vectors.shape[1]):
        if vectors[np.argmax(np.abs(vectors[:, i])), i] < 0:
            vectors[:, i] = -vectors[:, i]
    coords = vectors * np.sqrt(eigenvalues)
    if coords.shape[1] < target_dim:
        coords = np.hstack([coords, np.zeros((n, target_dim - coords.shape[1]))])
        eigenvalues = np.concatenate([eigenvalues, np.zeros(target_dim - eigenvalues.size)])
    return coords, eigenvalues


def isomap(dataset: MetricDataset, cfg: Optional[IsomapConfig] = None) -> IsomapEmbedding:
    cfg = cfg or IsomapConfig()
    cfg.validate()
    if len(dataset) < 2:
        raise InvalidIsomapConfig("Isomap needs at least two points")
    graph = knn_graph(dataset, cfg.k_neighbors)
    geodesics = geodesic_distances(graph, cfg.k_neighbors)
    coords, eigenvalues = classical_mds(geodesics, cfg.target_dim)
    logger.info(
        f"Isomap of {len(dataset)} points into R^{cfg.target_dim} (k={cfg.k_neighbors}), "
        f"leading eigenvalues {', '.join(f'{e:.4g}' for e in eigenvalues)}"
    )
    return IsomapEmbedding(coords=coords, eigenvalues=eigenvalues, config=cfg)
