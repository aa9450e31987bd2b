"""
Seeded generators for the example spaces: a noisy circle, the Moore space M(Z_3, 1)
and the Lens space L_q^2.
"""

import logging

import numpy as np

from .datasets import MetricDataset

logger = logging.getLogger(__name__)


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, int(q ** 0.5) + 1))


def _check_count(n: int):
    if n < 1:
        raise ValueError(f"Sample size must be at least 1, got {n}")


def sample_circle(n: int, noise_sigma: float = 0.0, seed=None) -> MetricDataset:
    """(1 + e) (cos t, sin t) with t uniform and e ~ N(0, noise_sigma^2) in the normal direction."""
    _check_count(n)
    if noise_sigma < 0:
        raise ValueError(f"noise_sigma must be non-negative, got {noise_sigma}")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    radius = 1.0 + rng.normal(0.0, noise_sigma, size=n) if noise_sigma > 0 else np.ones(n)
    points = np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])
    logger.info(f"Sampled {n} circle points (sigma={noise_sigma}, seed={seed})")
    return MetricDataset(points=points, metric_id='euclidean', seed=seed)


def sample_moore(n: int, seed=None, n_boundary: int = 0) -> MetricDataset:
    """
    n points uniform (area measure) on the closed unit disc, radius = sqrt(u).

    With n_boundary > 0 that many extra points are placed exactly on the unit circle and
    appended after the disc sample; their indices are kept in metadata['boundary_indices']
    so landmark selection can be seeded with them.
    """
    _check_count(n)
    if n_boundary < 0:
        raise ValueError(f"n_boundary must be non-negative, got {n_boundary}")
    rng = np.random.default_rng(seed)
    radius = np.sqrt(rng.uniform(0.0, 1.0, size=n))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    points = radius * np.exp(1j * theta)
    metadata = {}
    if n_boundary:
        rim = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=n_boundary))
        points = np.concatenate([points, rim])
        metadata['boundary_indices'] = list(range(n, n + n_boundary))
    logger.info(f"Sampled {n} Moore-space points (+{n_boundary} on the boundary, seed={seed})")
    return MetricDataset(points=points, metric_id='moore', seed=seed, metadata=metadata)


def sample_lens(n: int, q: int = 3, seed=None) -> MetricDataset:
    """Uniform points on S^3 in C^2 (normalized complex Gaussians), read as classes in L_q^2."""
    _check_count(n)
    if not _is_prime(q):
        raise ValueError(f"Lens samples need a prime modulus, got q={q}")
    rng = np.random.default_rng(seed)
    gaussians = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    points = gaussians / np.linalg.norm(gaussians, axis=1, keepdims=True)
    logger.info(f"Sampled {n} points of L_{q}^2 (seed={seed})")
    return MetricDataset(points=points, metric_id='lens', seed=seed, q=q)


SAMPLERS = {
    'circle': sample_circle,
    'moore': sample_moore,
    'lens': sample_lens,
}
