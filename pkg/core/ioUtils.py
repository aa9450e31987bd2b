# ============================================================================
# FILE HELPERS SHARED BY THE MANAGEMENT COMMANDS AND THE PIPELINE
# ============================================================================

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict

import numpy as np

logger = logging.getLogger(__name__)


def _finite_or_none(value):
    """JSON has no infinity; persistence deaths at +inf are written as null."""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite_or_none(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite_or_none(v) for v in value]
    return value


def dumps(payload: Any) -> str:
    """Serialize with sorted keys so identical payloads give identical bytes."""
    return json.dumps(_finite_or_none(payload), indent=2, sort_keys=True, allow_nan=False) + '\n'


def write_json(path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(payload), encoding='utf-8')
    logger.debug(f"Wrote {path}")
    return path


def read_json(path) -> Dict:
    with open(path, encoding='utf-8') as handle:
        return json.load(handle)
