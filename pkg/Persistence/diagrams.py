"""
Statistics on persistence diagrams: admissible class selection and persistence ratios.
"""

import logging
from typing import Tuple

import numpy as np

from core.errors import EXIT_NO_ADMISSIBLE_CLASS

from .cohomology import PersistenceDiagram

logger = logging.getLogger(__name__)


class NoAdmissibleClass(RuntimeError):
    """No dim-1 pair (a, b) satisfies 2a < b."""
    exit_code = EXIT_NO_ADMISSIBLE_CLASS


class EmptyDiagram(ValueError):
    """The diagram has no finite pair to measure."""


def select_class(dgm: PersistenceDiagram) -> Tuple[Tuple[float, float], int]:
    """
    The most persistent pair with 2a < b, and its index in dgm.pairs.
    Ties keep the earliest pair.
    """
    if not dgm.pairs:
        raise NoAdmissibleClass(f"Diagram of dim {dgm.dim} is empty")
    best_index, best_persistence = None, -np.inf
    for index, (birth, death) in enumerate(dgm.pairs):
        if 2 * birth < death and death - birth > best_persistence:
            best_index, best_persistence = index, death - birth
    if best_index is None:
        raise NoAdmissibleClass(
            f"None of the {len(dgm.pairs)} pairs in dim {dgm.dim} has 2a < b"
        )
    pair = dgm.pairs[best_index]
    logger.info(f"Selected class {pair} (persistence {best_persistence:.6g}) at index {best_index}")
    return pair, best_index


def _sorted_finite_persistences(dgm: PersistenceDiagram) -> np.ndarray:
    finite = dgm.finite_pairs
    if not finite:
        raise EmptyDiagram(f"Diagram of dim {dgm.dim} has no finite pairs")
    return np.sort([d - b for b, d in finite])[::-1]


def per_ratio(dgm: PersistenceDiagram) -> float:
    """per_1 / per_2 over finite pairs; +inf when there is a single finite pair."""
    persistences = _sorted_finite_persistences(dgm)
    if persistences.size == 1:
        return np.inf
    if persistences[1] == 0:
        return np.inf
    return float(persistences[0] / persistences[1])


def dominant_persistence(dgm: PersistenceDiagram) -> float:
    """Largest finite persistence, 0 for a diagram without finite pairs."""
    finite = dgm.finite_pairs
    if not finite:
        return 0.0
    return float(max(d - b for b, d in finite))
