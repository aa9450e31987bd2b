"""
Distance functions for the three example spaces.

Each metric has a scalar form and a block form `(rows, cols) -> matrix` that the
dataset container calls when filling distance blocks.
"""

import logging

import numpy as np
from scipy.spatial.distance import cdist

from Geometry.lensSpace import lens_distance_matrix, roots_of_unity

logger = logging.getLogger(__name__)

BOUNDARY_TOLERANCE = 1e-12

METRIC_IDS = ('euclidean', 'moore', 'lens')


class PointOutsideDisc(ValueError):
    """A Moore-space point does not lie in the closed unit disc."""


def _check_disc(values: np.ndarray):
    if np.any(np.abs(values) > 1.0 + BOUNDARY_TOLERANCE):
        raise PointOutsideDisc("Moore-space points must satisfy |x| <= 1")


def _real_inner_planar(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # <x, y>_R for complex numbers read as vectors of R^2
    return x.real * y.real + x.imag * y.imag


def moore_distance(x: complex, y: complex) -> float:
    """
    Dissimilarity on M(Z_3, 1) modelled as the closed unit disc.

    interior / interior : sqrt(|<x, y>_R|)
    exactly one on the boundary : min over zeta in Z_3 of sqrt(|<x, zeta y>_R|)
    both on the boundary : min over zeta in Z_3 of arccos(|<x, zeta y>_R|)

    Evaluated as written, so d(x, x) = |x| for interior x.
    """
    return float(moore_block(np.array([x], dtype=complex), np.array([y], dtype=complex))[0, 0])


def moore_block(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    rows = np.asarray(rows, dtype=complex).reshape(-1)
    cols = np.asarray(cols, dtype=complex).reshape(-1)
    _check_disc(rows)
    _check_disc(cols)

    x = rows[:, None]
    direct = np.abs(_real_inner_planar(x, cols[None, :]))
    rotated = np.stack([
        np.abs(_real_inner_planar(x, zeta * cols[None, :])) for zeta in roots_of_unity(3)
    ])

    on_row = (np.abs(rows) >= 1.0 - BOUNDARY_TOLERANCE)[:, None]
    on_col = (np.abs(cols) >= 1.0 - BOUNDARY_TOLERANCE)[None, :]

    interior = np.sqrt(direct)
    one_boundary = np.sqrt(rotated).min(axis=0)
    both_boundary = np.arccos(np.clip(rotated, -1.0, 1.0)).min(axis=0)

    result = np.where(on_row | on_col, one_boundary, interior)
    return np.where(on_row & on_col, both_boundary, result)


def euclidean_block(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    return cdist(np.atleast_2d(rows), np.atleast_2d(cols))


def lens_block(rows: np.ndarray, cols: np.ndarray, q: int) -> np.ndarray:
    return lens_distance_matrix(rows, cols, q)
