"""
Tensor Gauss-Legendre collocation grids mapped into elements.
"""

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from mesh.elements import Element
from spectral.basis import gauss_legendre
from tools.errors import InvalidArgumentError


@lru_cache(maxsize=64)
def local_tensor_rule(d: int, r: int) -> tuple[np.ndarray, np.ndarray]:
    """r^d tensor nodes in [-1, 1]^d (first dimension slowest) and product weights."""
    if d < 1:
        raise InvalidArgumentError(f"dimension must be >= 1, got {d}")
    nodes_1d, weights_1d = gauss_legendre(r)
    nodes = np.array(list(itertools.product(nodes_1d, repeat=d)), dtype=float).reshape(-1, d)
    weights = np.array([np.prod(w) for w in itertools.product(weights_1d, repeat=d)], dtype=float)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


@dataclass(frozen=True, eq=False)
class CollocationGrid:
    """Cubature nodes of one element; weights are the conditional measure."""
    element_id: int
    r: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    local_nodes: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.weights.size


def tensor_grid(element: Element, r: int) -> CollocationGrid:
    """Map the r^d tensor Gauss-Legendre rule into ``element``."""
    local_nodes, weights = local_tensor_rule(element.dimension, r)
    return CollocationGrid(
        element_id=element.id,
        r=r,
        nodes=element.to_global(local_nodes),
        weights=weights,
        local_nodes=local_nodes,
    )
