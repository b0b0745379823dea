"""
Orthonormal Legendre basis, Gauss-Legendre rules and total-degree index sets.

Every quantity here is normalized against the uniform density 1/2 on [-1, 1]
(1/2^d on the cube), so that

    E[phi_m phi_n] = delta_mn,     sum(weights) = 1.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import comb, roots_legendre

from tools.errors import InvalidArgumentError


def legendre_orthonormal(n: int, x: float | np.ndarray) -> float | np.ndarray:
    """sqrt(2n + 1) * P_n(x) by the three-term recurrence."""
    if n < 0:
        raise InvalidArgumentError(f"degree must be >= 0, got {n}")
    table = legendre_table(n, x)
    value = table[n]
    return float(value) if np.ndim(value) == 0 else value


def legendre_table(n_max: int, x: float | np.ndarray) -> np.ndarray:
    """Orthonormal Legendre values for degrees 0..n_max; shape (n_max + 1, *x.shape)."""
    x = np.asarray(x, dtype=float)
    table = np.empty((n_max + 1,) + x.shape)
    table[0] = 1.0
    if n_max >= 1:
        p_prev = np.ones_like(x)
        p_curr = x.copy()
        table[1] = np.sqrt(3.0) * p_curr
        for k in range(1, n_max):
            # (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
            p_next = ((2 * k + 1) * x * p_curr - k * p_prev) / (k + 1)
            p_prev, p_curr = p_curr, p_next
            table[k + 1] = np.sqrt(2 * k + 3) * p_curr
    return table


@lru_cache(maxsize=64)
def _gauss_legendre_cached(r: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(r)
    nodes = np.asarray(nodes, dtype=float)
    weights = np.asarray(weights, dtype=float) / 2.0
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def gauss_legendre(r: int) -> tuple[np.ndarray, np.ndarray]:
    """r-point Gauss-Legendre rule on [-1, 1] with weights summing to one."""
    if r < 1:
        raise InvalidArgumentError(f"node count must be >= 1, got {r}")
    return _gauss_legendre_cached(int(r))


def _compositions(total: int, parts: int):
    """Multi-indices of length ``parts`` summing to ``total``, first entry descending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True, eq=False)
class MultiIndexSet:
    """Total-degree multi-indices |i| <= p in graded order.

    Within one total degree the first component decreases, e.g. for d=2, p=2:
    (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).
    """
    d: int
    p: int
    indices: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.indices.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return self.indices.sum(axis=1)

    def reduced_mask(self, p0: int) -> np.ndarray:
        """Boolean mask of the indices with |i| <= p0."""
        return self.degrees <= p0

    def reduced_size(self, p0: int) -> int:
        """Number of indices with |i| <= p0; they form a prefix of the ordering."""
        return int(np.count_nonzero(self.reduced_mask(p0)))

    def position(self, multi_index) -> int:
        target = np.asarray(multi_index, dtype=int)
        hits = np.flatnonzero(np.all(self.indices == target, axis=1))
        if hits.size == 0:
            raise InvalidArgumentError(f"multi-index {tuple(target)} not in the set")
        return int(hits[0])

    def axis_position(self, dim: int, n: int) -> int:
        """Position of n * e_dim."""
        multi = np.zeros(self.d, dtype=int)
        multi[dim] = n
        return self.position(multi)


@lru_cache(maxsize=64)
def total_degree_indices(d: int, p: int) -> MultiIndexSet:
    """Graded total-degree index set; cardinality binomial(d + p, d)."""
    if d < 1 or p < 0:
        raise InvalidArgumentError(f"need d >= 1 and p >= 0, got d={d}, p={p}")
    rows = [multi for degree in range(p + 1) for multi in _compositions(degree, d)]
    indices = np.array(rows, dtype=int).reshape(-1, d)
    assert indices.shape[0] == int(comb(d + p, d, exact=True))
    indices.flags.writeable = False
    return MultiIndexSet(d=d, p=p, indices=indices)


def basis_matrix(index_set: MultiIndexSet, local_points: np.ndarray) -> np.ndarray:
    """Phi_i(xi) for every point (rows) and multi-index (columns)."""
    points = np.atleast_2d(np.asarray(local_points, dtype=float))
    if points.shape[-1] != index_set.d:
        raise InvalidArgumentError(f"points must have {index_set.d} coordinates")
    result = np.ones((points.shape[0], len(index_set)))
    for dim in range(index_set.d):
        table = legendre_table(index_set.p, points[:, dim])  # (p+1, n_points)
        result *= table[index_set.indices[:, dim]].T
    return result
