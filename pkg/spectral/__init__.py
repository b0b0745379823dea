"""
Spectral Package - orthonormal Legendre bases, quadrature and interpolation.
"""

from spectral.basis import (
    MultiIndexSet,
    basis_matrix,
    gauss_legendre,
    legendre_orthonormal,
    legendre_table,
    total_degree_indices,
)
from spectral.discretization import GpcState, LocalDiscretization
from spectral.grids import CollocationGrid, local_tensor_rule, tensor_grid
from spectral.interpolation import (
    differentiation_matrix,
    eval_gpc,
    gpc_coeffs_from_nodes,
    lagrange_basis_1d,
    lagrange_interpolate,
)

__all__ = [
    "CollocationGrid",
    "GpcState",
    "LocalDiscretization",
    "MultiIndexSet",
    "basis_matrix",
    "differentiation_matrix",
    "eval_gpc",
    "gauss_legendre",
    "gpc_coeffs_from_nodes",
    "lagrange_basis_1d",
    "lagrange_interpolate",
    "legendre_orthonormal",
    "legendre_table",
    "local_tensor_rule",
    "tensor_grid",
    "total_degree_indices",
]
