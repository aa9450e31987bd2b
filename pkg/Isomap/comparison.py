"""
Topology preservation of Isomap against Lens coordinates, measured by per_1 / per_2 of
the dim-1 Rips diagram of each reduced landmark cloud over several prime fields.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist

from Geometry.lensSpace import lens_distance_matrix
from Landmarks.selection import LandmarkSet
from LensMap.classifyingMap import LensCloud
from Persistence.cohomology import persistent_cohomology
from Persistence.diagrams import EmptyDiagram, per_ratio
from Persistence.rips import build_rips

from .isomap import IsomapConfig, IsomapEmbedding, isomap

logger = logging.getLogger(__name__)

ISOMAP = 'Isomap'
LENS_COORDINATES = 'Lens coordinates'


def _as_distance_matrix(D: np.ndarray) -> np.ndarray:
    D = 0.5 * (D + D.T)
    np.fill_diagonal(D, 0.0)
    return D


def per_ratios(distances: np.ndarray, q_list: Sequence[int]) -> Dict[int, float]:
    """per_1 / per_2 of the dim-1 Rips diagram over each Z_q; nan when no finite pair exists."""
    complex_ = build_rips(_as_distance_matrix(np.asarray(distances, dtype=float)), max_dim=2)
    ratios = {}
    for q in q_list:
        dgm = persistent_cohomology(complex_, q).diagrams[1]
        try:
            ratios[q] = per_ratio(dgm)
        except EmptyDiagram:
            logger.warning(f"No finite dim-1 pair over Z_{q}")
            ratios[q] = float('nan')
    return ratios


@dataclass
class PerRatioComparison:
    q_list: List[int]
    isomap: Dict[int, float]
    lens: Dict[int, float]
    config: IsomapConfig = field(default_factory=IsomapConfig)
    lens_dim: int = 2

    def lc_beats_isomap(self, q: int) -> bool:
        return bool(self.lens[q] > self.isomap[q])

    @property
    def rows(self) -> List[Dict]:
        return [
            {'method': method, 'q': q, 'per_ratio': ratios[q]}
            for method, ratios in ((ISOMAP, self.isomap), (LENS_COORDINATES, self.lens))
            for q in self.q_list
        ]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.rows).pivot(index='method', columns='q', values='per_ratio')
        frame.columns = [f"Z_{q}" for q in frame.columns]
        return frame.loc[[ISOMAP, LENS_COORDINATES]]

    def to_text(self) -> str:
        return self.to_frame().to_string(float_format=lambda v: f"{v:.4f}") + '\n'

    def as_document(self) -> Dict:
        return {
            'k_neighbors': self.config.k_neighbors,
            'isomap_dim': self.config.target_dim,
            'lens_dim': self.lens_dim,
            'rows': self.rows,
            'lc_beats_isomap': {str(q): self.lc_beats_isomap(q) for q in self.q_list},
        }


def compare_per_ratio(dataset, landmarks: LandmarkSet, q_list: Sequence[int], cfg: IsomapConfig,
                      lens_cloud: LensCloud, embedding: IsomapEmbedding = None) -> PerRatioComparison:
    """
    Isomap side: the embedding of the whole dataset restricted to the landmarks, Euclidean.
    Lens side: the rows of `lens_cloud` (P_k coordinates) at the landmarks, metric d_L.
    """
    q_list = [int(q) for q in q_list]
    if embedding is None:
        embedding = isomap(dataset, cfg)
    iso_points = embedding.restricted(landmarks.indices)
    iso_ratios = per_ratios(cdist(iso_points, iso_points), q_list)

    row_of = {source: row for row, source in enumerate(lens_cloud.source_indices)}
    rows = [row_of[i] for i in landmarks.indices if i in row_of]
    if len(rows) < len(landmarks):
        logger.warning(f"{len(landmarks) - len(rows)} landmarks have no Lens coordinates and are skipped")
    lens_reps = lens_cloud.reps[rows]
    lens_ratios = per_ratios(lens_distance_matrix(lens_reps, lens_reps, lens_cloud.q), q_list)

    comparison = PerRatioComparison(
        q_list=q_list, isomap=iso_ratios, lens=lens_ratios, config=cfg, lens_dim=lens_cloud.n
    )
    for q in q_list:
        logger.info(f"per_1/per_2 over Z_{q}: Isomap {iso_ratios[q]:.4f}, Lens coordinates {lens_ratios[q]:.4f}")
    return comparison
