"""
Vietoris-Rips filtrations on a landmark distance matrix.

R_alpha holds every vertex set of diameter strictly less than alpha. Simplices are kept
in one list sorted by (diameter, dimension, vertex tuple), which is the filtration order
the reduction walks.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-10

Simplex = Tuple[int, ...]


class AsymmetricInput(ValueError):
    """The distance matrix is not symmetric (or not square / not a valid dissimilarity)."""


@dataclass
class FilteredComplex:
    """
    simplices: (vertex tuple ascending, diameter) in filtration order.
    vertices are local ids 0..n-1; vertex_ids maps them back to dataset indices.
    """
    distances: np.ndarray
    simplices: List[Tuple[Simplex, float]]
    max_dim: int
    max_diameter: float = np.inf
    vertex_ids: Optional[List[int]] = None
    _position: Dict[Simplex, int] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self._position = {simplex: i for i, (simplex, _) in enumerate(self.simplices)}
        if self.vertex_ids is None:
            self.vertex_ids = list(range(self.n_vertices))

    def __len__(self):
        return len(self.simplices)

    @property
    def n_vertices(self) -> int:
        return self.distances.shape[0]

    @property
    def vertices(self) -> List[int]:
        return list(range(self.n_vertices))

    def position(self, simplex: Simplex) -> int:
        return self._position[simplex]

    def __contains__(self, simplex: Simplex) -> bool:
        return simplex in self._position

    def diameter(self, simplex: Simplex) -> float:
        return self.simplices[self._position[simplex]][1]

    def of_dim(self, dim: int) -> List[Tuple[Simplex, float]]:
        return [(s, d) for s, d in self.simplices if len(s) == dim + 1]

    def cofaces(self, simplex: Simplex) -> List[Simplex]:
        """Simplices of one dimension higher in the complex that contain `simplex`."""
        if len(simplex) > self.max_dim:
            return []
        members = set(simplex)
        result = []
        for v in range(self.n_vertices):
            if v in members:
                continue
            candidate = tuple(sorted(simplex + (v,)))
            if candidate in self._position:
                result.append(candidate)
        return result

    def validate(self):
        """Faces are present and never enter after the simplex; the stored order is a filtration."""
        previous = None
        for simplex, diameter in self.simplices:
            key = (diameter, len(simplex), simplex)
            if previous is not None and key < previous:
                raise ValueError(f"Simplex {simplex} is out of filtration order")
            previous = key
            if len(simplex) > 1:
                for drop in range(len(simplex)):
                    face = simplex[:drop] + simplex[drop + 1:]
                    if face not in self or self.diameter(face) > diameter:
                        raise ValueError(f"Face {face} of {simplex} missing or enters later")


def check_distance_matrix(distances) -> np.ndarray:
    D = np.asarray(distances, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise AsymmetricInput(f"Expected a square distance matrix, got shape {D.shape}")
    scale = max(1.0, float(np.abs(D).max())) if D.size else 1.0
    if not np.allclose(D, D.T, rtol=0.0, atol=SYMMETRY_TOLERANCE * scale):
        raise AsymmetricInput("Distance matrix is not symmetric")
    if np.any(D < 0) or not np.all(np.isfinite(D)):
        raise AsymmetricInput("Distances must be finite and nonnegative")
    if np.any(np.diag(D) != 0):
        raise AsymmetricInput("Distance matrix must have a zero diagonal")
    return 0.5 * (D + D.T)


def build_rips(distances, max_dim: int = 2, max_diameter: float = np.inf,
               vertex_ids: Optional[Sequence[int]] = None) -> FilteredComplex:
    """
    All simplices of dimension <= max_dim whose diameter is < max_diameter, by clique
    expansion of the neighbourhood graph. Vertices always enter at diameter 0.
    """
    if max_dim not in (1, 2, 3):
        raise ValueError(f"max_dim must be 1, 2 or 3, got {max_dim}")
    D = check_distance_matrix(distances)
    n = D.shape[0]

    # neighbours with a larger id, so every clique is built once in ascending order
    upper = [[j for j in range(i + 1, n) if D[i, j] < max_diameter] for i in range(n)]

    simplices: List[Tuple[Simplex, float]] = [((i,), 0.0) for i in range(n)]
    frontier: List[Tuple[Simplex, float, List[int]]] = [((i,), 0.0, upper[i]) for i in range(n)]
    for _ in range(max_dim):
        next_frontier = []
        for simplex, diameter, candidates in frontier:
            for pos, v in enumerate(candidates):
                grown = simplex + (v,)
                grown_diameter = max(diameter, max(D[u, v] for u in simplex))
                simplices.append((grown, float(grown_diameter)))
                common = [w for w in candidates[pos + 1:] if D[v, w] < max_diameter]
                next_frontier.append((grown, grown_diameter, common))
        frontier = next_frontier

    simplices.sort(key=lambda item: (item[1], len(item[0]), item[0]))
    ids = list(vertex_ids) if vertex_ids is not None else None
    complex_ = FilteredComplex(
        distances=D, simplices=simplices, max_dim=max_dim, max_diameter=max_diameter, vertex_ids=ids
    )
    logger.info(
        f"Rips complex on {n} vertices: {len(complex_)} simplices up to dim {max_dim}"
        f" (max diameter {max_diameter})"
    )
    return complex_


def landmark_distances(dataset, indices: Sequence[int]) -> np.ndarray:
    """Symmetrized landmark-to-landmark block of a dataset, zero diagonal."""
    block = dataset.block(indices, indices)
    return 0.5 * (block + block.T)
