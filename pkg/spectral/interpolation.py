"""
Interpolation operators on collocation grids.

Two ways to reconstruct a function from its nodal values on an element:
- gPC: discrete projection onto the orthonormal basis, then evaluation
- Lagrange: tensor-product barycentric interpolation through the nodes
"""

from functools import lru_cache

import numpy as np

from spectral.basis import MultiIndexSet, basis_matrix, gauss_legendre
from spectral.grids import CollocationGrid
from tools.errors import InvalidArgumentError


def gpc_coeffs_from_nodes(
    values: np.ndarray,
    grid: CollocationGrid,
    index_set: MultiIndexSet,
) -> np.ndarray:
    """u_i = sum_j u(z_j) Phi_i(z_j) w_j.

    ``values`` has the node axis first; the result moves it to the last axis
    and replaces it by the basis axis, i.e. (n_nodes, *rest) -> (*rest, n_basis).
    """
    values = np.asarray(values, dtype=float)
    if values.shape[0] != len(grid):
        raise InvalidArgumentError(f"{values.shape[0]} values for {len(grid)} nodes")
    weighted = basis_matrix(index_set, grid.local_nodes) * grid.weights[:, None]
    return np.tensordot(values, weighted, axes=(0, 0))


def eval_gpc(coefficients: np.ndarray, index_set: MultiIndexSet, xi_local: np.ndarray) -> np.ndarray:
    """sum_i u_i Phi_i(xi) at one local point (shape (d,)) or several (shape (m, d))."""
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.shape[-1] != len(index_set):
        raise InvalidArgumentError(f"{coefficients.shape[-1]} coefficients for {len(index_set)} basis functions")
    xi_local = np.asarray(xi_local, dtype=float)
    single = xi_local.ndim == 1
    phi = basis_matrix(index_set, np.atleast_2d(xi_local))  # (m, nb)
    values = np.moveaxis(np.tensordot(coefficients, phi, axes=(-1, 1)), -1, 0)  # (m, *rest)
    return values[0] if single else values


@lru_cache(maxsize=64)
def barycentric_weights(r: int) -> np.ndarray:
    """Barycentric weights of the r Gauss-Legendre nodes.

    Closed form w_j ~ (-1)^(#nodes above x_j) * sqrt((1 - x_j^2) * lambda_j),
    which stays finite for the few hundred nodes of a global collocation run.
    """
    nodes, quad_weights = gauss_legendre(r)
    above = np.sum(nodes[None, :] > nodes[:, None], axis=1)
    weights = (-1.0) ** above * np.sqrt((1.0 - nodes ** 2) * quad_weights)
    weights = weights / np.max(np.abs(weights))
    weights.flags.writeable = False
    return weights


def lagrange_basis_1d(r: int, x: np.ndarray) -> np.ndarray:
    """Lagrange cardinal functions l_j(x) on the r Gauss nodes; shape (len(x), r)."""
    nodes, _ = gauss_legendre(r)
    bary = barycentric_weights(r)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    diff = x[:, None] - nodes[None, :]
    exact = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = bary[None, :] / diff
        basis = terms / terms.sum(axis=1, keepdims=True)
    hit_rows = exact.any(axis=1)
    if np.any(hit_rows):
        basis[hit_rows] = exact[hit_rows].astype(float)
    return basis


def differentiation_matrix(r: int) -> np.ndarray:
    """D[k, j] = l_j'(x_k) on the r Gauss-Legendre nodes."""
    nodes, _ = gauss_legendre(r)
    bary = barycentric_weights(r)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    matrix = (bary[None, :] / bary[:, None]) / diff
    np.fill_diagonal(matrix, 0.0)
    np.fill_diagonal(matrix, -matrix.sum(axis=1))
    return matrix


def lagrange_interpolate(values: np.ndarray, grid: CollocationGrid, xi_local: np.ndarray) -> np.ndarray:
    """Tensor-product Lagrange interpolant of nodal values at local point(s)."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] != len(grid):
        raise InvalidArgumentError(f"{values.shape[0]} values for {len(grid)} nodes")
    xi_local = np.asarray(xi_local, dtype=float)
    single = xi_local.ndim == 1
    points = np.atleast_2d(xi_local)
    d = points.shape[1]
    r = grid.r
    rest = values.shape[1:]
    tensor = values.reshape((r,) * d + rest)

    out = []
    for point in points:
        result = tensor
        # contract the slowest (first) axis each time
        for dim in range(d):
            weights = lagrange_basis_1d(r, point[dim])[0]
            result = np.tensordot(weights, result, axes=(0, 0))
        out.append(result)
    out = np.array(out)
    return out[0] if single else out
