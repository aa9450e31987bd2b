"""
Persistent cohomology over F_q by reduction of the coboundary matrix.

Columns are the coboundaries of the d-simplices, visited in reverse filtration order;
the pivot of a column is its earliest coface. This is the anti-transpose of the usual
boundary reduction, so it yields the same pairs as persistent homology, and the
accumulated column operations are genuine cocycle representatives.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .rips import FilteredComplex, Simplex

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


class NotPrime(ValueError):
    """Coefficients must be a prime field."""


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, int(q ** 0.5) + 1))


def check_prime(q: int) -> int:
    if not is_prime(int(q)):
        raise NotPrime(f"Persistent cohomology needs a prime field, got q={q}")
    return int(q)


def inverse_mod(a: int, q: int) -> int:
    """Multiplicative inverse in F_q by Fermat: a^(q-2)."""
    return pow(a, q - 2, q)


@dataclass
class PersistenceDiagram:
    dim: int
    pairs: List[Tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        self.pairs = [(float(b), float(d)) for b, d in self.pairs]
        for birth, death in self.pairs:
            if birth > death:
                raise ValueError(f"Pair ({birth}, {death}) has birth after death")

    def __len__(self):
        return len(self.pairs)

    @property
    def finite_pairs(self) -> List[Tuple[float, float]]:
        return [(b, d) for b, d in self.pairs if np.isfinite(d)]

    @property
    def persistences(self) -> np.ndarray:
        return np.array([d - b for b, d in self.pairs])


@dataclass
class Cocycle:
    """
    Z_q values on ordered edges (j, k), j < k, of the landmark Rips complex.

    Every edge of diameter below valid_below is stored (zeros included), so a missing
    key means the edge is not part of the complex at that scale.
    """
    q: int
    values: Dict[Edge, int]
    valid_below: float
    birth: Optional[float] = None
    death: Optional[float] = None

    @property
    def edge_rows(self) -> List[List[int]]:
        return [[j, k, int(v)] for (j, k), v in sorted(self.values.items())]

    def has_edge(self, j: int, k: int) -> bool:
        return j == k or (min(j, k), max(j, k)) in self.values

    def value(self, j: int, k: int) -> int:
        """eta_jk with eta_jj = 0 and eta_kj = -eta_jk; KeyError when the edge is absent."""
        if j == k:
            return 0
        if j < k:
            return self.values[(j, k)]
        return (-self.values[(k, j)]) % self.q

    def as_matrix(self, n: int) -> Tuple[np.ndarray, np.ndarray]:
        """Antisymmetric value matrix E (E[j, k] = eta_jk mod q) and the edge mask."""
        E = np.zeros((n, n), dtype=int)
        mask = np.eye(n, dtype=bool)
        for (j, k), val in self.values.items():
            E[j, k] = val % self.q
            E[k, j] = (-val) % self.q
            mask[j, k] = mask[k, j] = True
        return E, mask

    def add_coboundary(self, alpha) -> 'Cocycle':
        """eta + delta0(alpha), with delta0(alpha)(j, k) = alpha_k - alpha_j."""
        alpha = [int(a) for a in alpha]
        values = {(j, k): (v + alpha[k] - alpha[j]) % self.q for (j, k), v in self.values.items()}
        return Cocycle(q=self.q, values=values, valid_below=self.valid_below, birth=self.birth, death=self.death)

    def violations(self, complex_: FilteredComplex) -> List[Simplex]:
        """2-simplices below valid_below where eta_ab + eta_bc != eta_ac (mod q)."""
        bad = []
        for simplex, diameter in complex_.of_dim(2):
            if diameter >= self.valid_below:
                break
            a, b, c = simplex
            try:
                if (self.value(a, b) + self.value(b, c) - self.value(a, c)) % self.q:
                    bad.append(simplex)
            except KeyError:
                bad.append(simplex)
        return bad


@dataclass
class PersistenceResult:
    q: int
    diagrams: Dict[int, PersistenceDiagram]
    # aligned with diagrams[1].pairs
    cocycles: List[Cocycle]
    complex: FilteredComplex = field(repr=False, default=None)


def _coboundary(complex_: FilteredComplex, simplex: Simplex, q: int) -> Dict[int, int]:
    """delta(simplex) as {position of coface: coefficient}; coefficient of s in d(t) is (-1)^i."""
    column = {}
    for coface in complex_.cofaces(simplex):
        missing = next(i for i, v in enumerate(coface) if v not in simplex)
        column[complex_.position(coface)] = 1 if missing % 2 == 0 else q - 1
    return column


def _axpy(target: Dict[int, int], source: Dict[int, int], factor: int, q: int):
    """target -= factor * source (mod q), in place, dropping zeros."""
    for key, val in source.items():
        updated = (target.get(key, 0) - factor * val) % q
        if updated:
            target[key] = updated
        else:
            target.pop(key, None)


def _reduce_dimension(complex_: FilteredComplex, dim: int, q: int):
    """
    Reduce the coboundary columns of every dim-simplex.

    Returns (pairs, zeros, pivots): pairs are (simplex position, pivot position, V column),
    zeros (simplex position, V column) for columns that reduce to zero, and the pivot positions.
    """
    positions = [i for i, (s, _) in enumerate(complex_.simplices) if len(s) == dim + 1]
    pivot_owner: Dict[int, Tuple[Dict[int, int], Dict[int, int]]] = {}
    pairs, zeros = [], []

    for pos in reversed(positions):
        simplex = complex_.simplices[pos][0]
        column = _coboundary(complex_, simplex, q)
        combination = {pos: 1}
        while column:
            pivot = min(column)
            owner = pivot_owner.get(pivot)
            if owner is None:
                break
            owner_column, owner_combination = owner
            factor = column[pivot] * inverse_mod(owner_column[pivot], q) % q
            _axpy(column, owner_column, factor, q)
            _axpy(combination, owner_combination, factor, q)
        if column:
            pivot = min(column)
            pivot_owner[pivot] = (column, combination)
            pairs.append((pos, pivot, combination))
        else:
            zeros.append((pos, combination))
    return pairs, zeros, set(pivot_owner)


def _edge_cocycle(complex_: FilteredComplex, combination: Dict[int, int], q: int,
                  birth: float, death: float) -> Cocycle:
    values = {}
    edges = complex_.of_dim(1)
    for simplex, diameter in edges:
        if diameter < death:
            values[simplex] = combination.get(complex_.position(simplex), 0) % q
    return Cocycle(q=q, values=values, valid_below=death, birth=birth, death=death)


def persistent_cohomology(complex_: FilteredComplex, q: int) -> PersistenceResult:
    """
    Diagrams for dims 0..max_dim-1 over F_q, plus a representative cocycle for every
    dim-1 pair. Zero-length pairs are dropped; essential classes die at +inf.
    """
    q = check_prime(q)
    diagrams: Dict[int, PersistenceDiagram] = {}
    cocycles: List[Cocycle] = []
    lower_pivots = set()

    for dim in range(complex_.max_dim):
        pairs, zeros, pivots = _reduce_dimension(complex_, dim, q)
        found = []
        for pos, pivot, combination in pairs:
            birth = complex_.simplices[pos][1]
            death = complex_.simplices[pivot][1]
            if death > birth:
                found.append((birth, death, pos, combination))
        dropped = len(pairs) - len(found)
        for pos, combination in zeros:
            if pos not in lower_pivots:
                found.append((complex_.simplices[pos][1], np.inf, pos, combination))

        found.sort(key=lambda item: (item[0], item[1], item[2]))
        diagrams[dim] = PersistenceDiagram(dim=dim, pairs=[(b, d) for b, d, _, _ in found])
        if dim == 1:
            cocycles = [_edge_cocycle(complex_, comb, q, b, d) for b, d, _, comb in found]
        lower_pivots = pivots
        logger.info(
            f"PH^{dim} over Z_{q}: {len(diagrams[dim])} pairs"
            + (f" ({dropped} zero-length pairs dropped)" if dropped else '')
        )

    return PersistenceResult(q=q, diagrams=diagrams, cocycles=cocycles, complex=complex_)
