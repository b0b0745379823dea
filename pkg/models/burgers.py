"""
Inviscid Burgers equation on (-1, 1) for physical-space refinement.

    u_t + u u_x = 0,   u(x, 0) = sin(2 pi x),   u(-1, t) = u(1, t) = 0

Each element carries nodal values at its Gauss-Legendre points. The flux
f = u^2 / 2 is differentiated with the nodal (Lagrange) differentiation matrix
in weak form; neighbouring elements talk only through one shared interface
value per edge, f* = (u*)^2 / 2.
"""

from functools import lru_cache

import numpy as np

from spectral.basis import gauss_legendre
from spectral.interpolation import differentiation_matrix, lagrange_basis_1d
from tools.errors import IncompleteCouplingError

BREAKING_TIME = 1.0 / (2.0 * np.pi)


def initial_condition(x: np.ndarray) -> np.ndarray:
    return np.sin(2.0 * np.pi * np.asarray(x, dtype=float))


@lru_cache(maxsize=16)
def element_operators(r: int) -> dict[str, np.ndarray]:
    """Reference-element operators for r Gauss points."""
    _, weights = gauss_legendre(r)
    edges = lagrange_basis_1d(r, np.array([-1.0, 1.0]))
    return {
        "weights": 2.0 * weights,  # reference weights, sum to 2
        "D": differentiation_matrix(r),
        "left": edges[0],
        "right": edges[1],
    }


def boundary_values(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Element-local extrapolation of nodal values to the left and right edges."""
    ops = element_operators(u.shape[-1])
    return u @ ops["left"], u @ ops["right"]


def burgers_element_rhs(u: np.ndarray, interface_values: np.ndarray | None, widths: np.ndarray | float) -> np.ndarray:
    """du/dt on every element.

    u: nodal values (..., r); interface_values: shared values (..., 2) at the
    (left, right) edge of each element; widths: physical element widths.
    """
    u = np.asarray(u, dtype=float)
    if interface_values is None:
        raise IncompleteCouplingError("interface values are required for every element")
    interface_values = np.asarray(interface_values, dtype=float)
    if interface_values.shape != u.shape[:-1] + (2,) or not np.all(np.isfinite(interface_values)):
        raise IncompleteCouplingError(
            f"interface values shaped {interface_values.shape} do not cover elements shaped {u.shape[:-1]}"
        )

    ops = element_operators(u.shape[-1])
    weights = ops["weights"]
    flux = 0.5 * u * u
    flux_left = 0.5 * interface_values[..., 0:1] ** 2
    flux_right = 0.5 * interface_values[..., 1:2] ** 2

    volume = (weights * flux) @ ops["D"]
    surface = flux_right * ops["right"] - flux_left * ops["left"]
    scale = 2.0 / np.asarray(widths, dtype=float)
    if np.ndim(scale):
        scale = scale[..., None]
    return scale * (volume - surface) / weights


def local_advection_rate(u: np.ndarray, widths: np.ndarray | float) -> np.ndarray:
    """-u u_x from element-local spectral differentiation (no coupling)."""
    ops = element_operators(u.shape[-1])
    scale = 2.0 / np.asarray(widths, dtype=float)
    u_x = u @ ops["D"].T
    if np.ndim(scale):
        u_x = scale[..., None] * u_x
    else:
        u_x = scale * u_x
    return -u * u_x


def total_variation(values: np.ndarray) -> float:
    """Sum of |jumps| of a sequence ordered by position."""
    values = np.asarray(values, dtype=float).ravel()
    return float(np.sum(np.abs(np.diff(values))))
