"""
Lens Principal Component Analysis.

Components are built from the last one down. v_n is the least-variance direction of the
cloud; each v_k is the least-variance direction of the cloud pushed into the orthogonal
complement of v_{k+1}, ..., v_n. P_k(Y) expresses every point in v_1, ..., v_k, so that
P_k(Y) lives in L_q^k.

Variance is reported in two indexings. `pvar` follows the definition, where pvar(1) is
an empty sum. `reported_pvar` drops that entry, so its first column belongs to the first
reduced dimension, the way variance tables are usually printed.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from Geometry.lensSpace import DimensionMismatch, LensPoint, as_cvec, hermitian_eig, project_offspan
from LensMap.classifyingMap import LensCloud

logger = logging.getLogger(__name__)

ZERO_TOLERANCE = 1e-12
BASIS_TOLERANCE = 1e-8
ORTHONORMAL_TOLERANCE = 1e-8
TABLE_DIMS = 5
PVAR_CONVENTION = 'reported_pvar[d-1] = pvar(d+1); column d is the first reduced dimension d'


class DegenerateProjection(ValueError):
    """The point lies in the complex span of the direction being projected away."""


class EmptyCloud(ValueError):
    pass


def lens_project(u, v: LensPoint) -> Tuple[LensPoint, float]:
    """
    The class in L^{n-1}(u) closest to [v], and its distance arccos(|P_u^perp v|).

    The angle is taken as atan2(|<v, u>|, |P_u^perp v|), which equals the arccos form
    for a unit v and keeps its digits when the residual is close to 1.
    """
    u = as_cvec(u)
    if abs(np.linalg.norm(u) - 1.0) >= 1e-9:
        raise ValueError(f"Projection direction must be a unit vector, got norm {np.linalg.norm(u)!r}")
    if u.size != v.dim:
        raise DimensionMismatch(f"Direction of length {u.size} for a point of L^{v.dim}")
    residual = project_offspan(u, v.rep)
    norm = float(np.linalg.norm(residual))
    if norm <= ZERO_TOLERANCE:
        raise DegenerateProjection("Point lies in the span of the projection direction")
    distance = float(np.arctan2(abs(np.vdot(u, v.rep)), norm))
    return LensPoint(residual / norm, v.q), distance


def _as_reps(cloud) -> np.ndarray:
    reps = cloud.reps if isinstance(cloud, LensCloud) else cloud
    return np.atleast_2d(np.asarray(reps, dtype=complex))


def covariance(cloud) -> np.ndarray:
    """Cov(Y) = (1/N) sum_j y_j y_j^H; unchanged when any y_j is multiplied by a unit scalar."""
    reps = _as_reps(cloud)
    if reps.shape[0] == 0:
        raise EmptyCloud("Covariance of an empty cloud")
    return reps.T @ reps.conj() / reps.shape[0]


def last_lens_comp(cloud) -> np.ndarray:
    """Eigenvector of Cov(Y) for the smallest eigenvalue, phase fixed by hermitian_eig."""
    return hermitian_eig(covariance(cloud)).vectors[:, 0]


def _complement_basis(fixed: np.ndarray, k: int) -> np.ndarray:
    """
    k orthonormal columns spanning the complement of `fixed`, found by running
    Gram-Schmidt (two passes) on e_1, e_2, ... in that order.
    """
    n = fixed.shape[0]
    basis = [fixed[:, i] for i in range(fixed.shape[1])]
    found: List[np.ndarray] = []
    for i in range(n):
        candidate = np.zeros(n, dtype=complex)
        candidate[i] = 1.0
        for _ in range(2):
            for b in basis + found:
                candidate = candidate - np.vdot(b, candidate) * b
        norm = np.linalg.norm(candidate)
        if norm > BASIS_TOLERANCE:
            found.append(candidate / norm)
            if len(found) == k:
                break
    if len(found) < k:
        raise RuntimeError(f"Could not complete a basis of dimension {k} in C^{n}")
    return np.column_stack(found)


def _normalized_rows(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Unit rows of `matrix` and the mask of rows long enough to normalize."""
    norms = np.linalg.norm(matrix, axis=1)
    keep = norms >= ZERO_TOLERANCE
    return matrix[keep] / norms[keep, None], keep


@dataclass
class LpcaResult:
    """
    components: n x n, column k-1 holds v_k.
    var / pvar: index k-1 holds var_k / pvar(k), k = 1..n.
    """
    components: np.ndarray
    q: int
    var: np.ndarray
    pvar: np.ndarray
    zero_vector_count: int = 0
    cloud: Optional[LensCloud] = field(default=None, repr=False)
    coords: Dict[int, LensCloud] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.components = np.asarray(self.components, dtype=complex)
        self.var = np.asarray(self.var, dtype=float)
        self.pvar = np.asarray(self.pvar, dtype=float)
        self.coords = {int(k): c for k, c in self.coords.items()}

    @property
    def n(self) -> int:
        return self.components.shape[0]

    @property
    def reported_pvar(self) -> List[float]:
        return self.pvar[1:].tolist()

    @property
    def component_pairs(self) -> List[List[List[float]]]:
        columns = self.components.T
        return np.stack([columns.real, columns.imag], axis=-1).tolist()

    def component(self, k: int) -> np.ndarray:
        return self.components[:, k - 1]

    def coordinates(self, k: int) -> LensCloud:
        """P_k(Y): classes of V_k^H y_j / |V_k^H y_j|, rows with V_k^H y_j = 0 left out."""
        if not 1 <= k <= self.n:
            raise ValueError(f"Coordinates exist for k = 1..{self.n}, got {k}")
        if k in self.coords:
            return self.coords[k]
        if self.cloud is None:
            raise ValueError(f"P_{k} was not stored and the source cloud is not available")

        projected = self.cloud.reps @ self.components[:, :k].conj()
        reps, keep = _normalized_rows(projected)
        if not keep.all():
            logger.warning(f"P_{k}: dropped {int((~keep).sum())} points with zero projection")
        sources = [s for s, kept in zip(self.cloud.source_indices, keep) if kept]
        coords = LensCloud(reps=reps.reshape(-1, k), q=self.q, source_indices=sources)
        self.coords[k] = coords
        return coords

    def validate(self):
        n = self.n
        if self.components.shape != (n, n):
            raise ValueError(f"Expected {n} components in C^{n}, got shape {self.components.shape}")
        if self.var.shape != (n,) or self.pvar.shape != (n,):
            raise ValueError("var and pvar need one entry per dimension")
        gram = self.components.conj().T @ self.components
        error = np.abs(gram - np.eye(n)).max()
        if error >= ORTHONORMAL_TOLERANCE:
            raise ValueError(f"Components are not orthonormal (worst entry off by {error:.3g})")
        if np.any(np.diff(self.pvar) < -1e-12):
            raise ValueError("pvar must be nondecreasing")
        if abs(self.pvar[-1] - 1.0) > 1e-12:
            raise ValueError(f"pvar(n) must be 1, got {self.pvar[-1]!r}")


def variance_profile(cloud, components: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    var_k = (1/N) sum_{l=2..k} sum_j d_L(w_j^l, L^{l-1}(e_{l-1}))^2 with w_j^l the unit
    class of V_l^H y_j, and e_{l-1} = [0, ..., 0, 1, 0] in C^l. The distance to the
    sub-Lens space is arccos of the norm left after removing that coordinate.
    """
    reps = _as_reps(cloud)
    components = np.asarray(components, dtype=complex)
    N, n = reps.shape
    if N == 0:
        raise EmptyCloud("Variance of an empty cloud")
    var = np.zeros(n)
    dropped = 0
    for l in range(2, n + 1):
        w, keep = _normalized_rows(reps @ components[:, :l].conj())
        dropped += int((~keep).sum())
        along = np.abs(w[:, l - 2])
        rest = np.linalg.norm(np.delete(w, l - 2, axis=1), axis=1)
        var[l - 1] = var[l - 2] + float(np.sum(np.arctan2(along, rest) ** 2)) / N
    if dropped:
        logger.warning(f"Variance profile skipped {dropped} zero projections")

    if var[-1] > 0:
        pvar = var / var[-1]
    else:
        logger.warning("Total variance is zero; pvar set to 1 from dimension 2 on")
        pvar = np.ones(n)
        pvar[0] = 0.0
    pvar[-1] = 1.0
    return var, pvar


def lpca(cloud: LensCloud) -> LpcaResult:
    """Lens principal components of a cloud in L_q^n, n >= 2, with its variance profile."""
    reps = _as_reps(cloud)
    N, n = reps.shape
    if N == 0:
        raise EmptyCloud("LPCA needs at least one point")
    if n < 2:
        raise ValueError(f"LPCA needs a cloud in L_q^n with n >= 2, got n={n}")

    components = np.zeros((n, n), dtype=complex)
    components[:, n - 1] = last_lens_comp(reps)
    zero_vectors = 0
    for k in range(n - 1, 0, -1):
        basis = _complement_basis(components[:, k:], k)
        projected, keep = _normalized_rows(reps @ basis.conj())
        zero_vectors += int((~keep).sum())
        if keep.any():
            components[:, k - 1] = basis @ last_lens_comp(projected)
        else:
            logger.warning(f"Every point projects to zero at stage {k}; taking the last basis vector")
            components[:, k - 1] = basis[:, -1]
    if zero_vectors:
        logger.warning(f"LPCA dropped {zero_vectors} zero projections from the stage covariances")

    var, pvar = variance_profile(reps, components)
    result = LpcaResult(
        components=components,
        q=cloud.q,
        var=var,
        pvar=pvar,
        zero_vector_count=zero_vectors,
        cloud=cloud,
    )
    result.validate()
    logger.info(
        f"LPCA on {N} points of L_{cloud.q}^{n}: reported pvar "
        + ', '.join(f"{p:.3f}" for p in result.reported_pvar[:TABLE_DIMS])
    )
    return result


def choose_dim(pvar: Sequence[float], tau: Optional[float] = None, gamma: Optional[float] = None) -> int:
    """
    Target dimension from a variance profile whose first entry belongs to dimension 1.

    tau: smallest k with pvar(k) >= tau.
    gamma: smallest k with pvar(k+1) - pvar(k) < gamma.
    Falls back to the last dimension.
    """
    if (tau is None) == (gamma is None):
        raise ValueError("Pass exactly one of tau or gamma")
    profile = [float(p) for p in pvar]
    if tau is not None:
        for k, value in enumerate(profile, start=1):
            if value >= tau:
                return k
        return len(profile)
    for k in range(1, len(profile)):
        if profile[k] - profile[k - 1] < gamma:
            return k
    return len(profile)


def variance_table_row(pvar: Sequence[float], dims: int = TABLE_DIMS) -> Dict[str, Optional[float]]:
    """{'Dim 1': ..., 'Dim d': ...} rounded to 4 places; columns past the profile are None."""
    profile = list(pvar)
    return {
        f"Dim {d}": round(float(profile[d - 1]), 4) if d <= len(profile) else None
        for d in range(1, dims + 1)
    }
