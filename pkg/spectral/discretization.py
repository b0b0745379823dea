"""
LocalDiscretization - the element-independent part of a multi-element
discretization.

All elements of a run share d, p and r, so the basis matrix at the local
tensor nodes is computed once and applied to stacked element arrays.

Array layouts (leading ``...`` is usually the element axis):
    nodal values   (..., n_nodes, n_vars, n_dofs)
    coefficients   (..., n_vars, n_dofs, n_basis)
"""

import math
from dataclasses import dataclass

import numpy as np

from mesh.elements import Element
from spectral.basis import MultiIndexSet, basis_matrix, total_degree_indices
from spectral.grids import CollocationGrid, local_tensor_rule, tensor_grid
from tools.errors import InvalidArgumentError


class LocalDiscretization:
    """Index set, tensor rule and basis tables for one (d, p, r)."""

    def __init__(self, d: int, p: int, r: int | None = None, over_integration: float = 1.0):
        if p < 0:
            raise InvalidArgumentError(f"p must be >= 0, got {p}")
        self.d = d
        self.p = p
        self.r = int(r) if r is not None else int(math.ceil(over_integration * (p + 1)))
        if self.r < 1:
            raise InvalidArgumentError(f"r must be >= 1, got {self.r}")
        self.index_set: MultiIndexSet = total_degree_indices(d, p)
        self.local_nodes, self.weights = local_tensor_rule(d, self.r)
        self.basis = basis_matrix(self.index_set, self.local_nodes)  # (n_nodes, n_basis)
        self.projector = self.basis * self.weights[:, None]

    def __repr__(self) -> str:
        return f"LocalDiscretization(d={self.d}, p={self.p}, r={self.r})"

    @property
    def n_nodes(self) -> int:
        return self.weights.size

    @property
    def n_basis(self) -> int:
        return len(self.index_set)

    def grid(self, element: Element) -> CollocationGrid:
        return tensor_grid(element, self.r)

    def global_nodes(self, element: Element) -> np.ndarray:
        return element.to_global(self.local_nodes)

    def project(self, values: np.ndarray, n_basis: int | None = None) -> np.ndarray:
        """Discrete projection (..., n, v, x) -> (..., v, x, b), optionally onto the first n_basis functions."""
        projector = self.projector if n_basis is None else self.projector[:, :n_basis]
        return np.einsum("nb,...nvx->...vxb", projector, values)

    def evaluate(self, coefficients: np.ndarray, basis: np.ndarray | None = None) -> np.ndarray:
        """Expansion values at the tensor nodes (or rows of ``basis``): (..., v, x, b) -> (..., n, v, x)."""
        basis = self.basis if basis is None else basis
        # a shorter coefficient axis means a reduced (prefix) expansion
        basis = basis[:, : coefficients.shape[-1]]
        return np.einsum("nb,...vxb->...nvx", basis, coefficients)

    def truncate(self, coefficients: np.ndarray, p0: int) -> np.ndarray:
        """Zero every coefficient with |i| > p0."""
        mask = self.index_set.reduced_mask(p0)
        return coefficients * mask

    def conditional_moments(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """E[u | B_k] and E[u^2 | B_k] from nodal values (..., n, v, x)."""
        mean = np.einsum("n,...nvx->...vx", self.weights, values)
        second = np.einsum("n,...nvx->...vx", self.weights, values * values)
        return mean, second


@dataclass
class GpcState:
    """Coefficients u_i of one element, shaped (n_vars, n_dofs, n_basis)."""
    element_id: int
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.ndim != 3:
            raise InvalidArgumentError("coefficients must be shaped (n_vars, n_dofs, n_basis)")

    @property
    def mean(self) -> np.ndarray:
        return self.coefficients[..., 0]

    @property
    def second_moment(self) -> np.ndarray:
        return np.sum(self.coefficients ** 2, axis=-1)
