"""
Plot-ready point files: CSV with columns x, y, z, source_index (and an optional color
column), or the same rows as JSON records.
"""

import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from core.ioUtils import read_json, write_json

logger = logging.getLogger(__name__)

COLUMNS = ['x', 'y', 'z', 'source_index']
FLOAT_FORMAT = '%.17g'
FORMATS = ('csv', 'json')


def points_frame(xyz, source_indices: Optional[Sequence[int]] = None, color: Optional[Sequence] = None) -> pd.DataFrame:
    xyz = np.asarray(xyz, dtype=float).reshape(-1, 3)
    if source_indices is None:
        source_indices = range(xyz.shape[0])
    indices = np.asarray(list(source_indices), dtype=int)
    if indices.size != xyz.shape[0]:
        raise ValueError(f"{indices.size} source indices for {xyz.shape[0]} points")
    frame = pd.DataFrame({'x': xyz[:, 0], 'y': xyz[:, 1], 'z': xyz[:, 2], 'source_index': indices})
    if color is not None:
        frame['color'] = list(color)
    return frame


def export_cloud(xyz, path, fmt: str = 'csv', source_indices: Optional[Sequence[int]] = None,
                 color: Optional[Sequence] = None) -> Path:
    if fmt not in FORMATS:
        raise ValueError(f"Unknown export format '{fmt}', expected one of {FORMATS}")
    frame = points_frame(xyz, source_indices, color)
    path = Path(path)
    if fmt == 'json':
        return write_json(path, {'columns': list(frame.columns), 'points': frame.to_dict(orient='records')})
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path


def read_export(path) -> pd.DataFrame:
    path = Path(path)
    if path.suffix == '.json':
        payload = read_json(path)
        return pd.DataFrame.from_records(payload['points'], columns=payload['columns'])
    return pd.read_csv(path, float_precision='round_trip')
