"""
Physical-space propagation for 1D Burgers on a mesh of (-1, 1).

Elements are coupled only through one shared value per interface. Every RK
stage recomputes the interface values from the current element states.
"""

import logging
from typing import Mapping

import numpy as np

from mesh.elements import ElementMesh
from models.burgers import boundary_values, burgers_element_rhs
from propagation.integrators import rk4_step
from tools.errors import IncompleteCouplingError, InvalidArgumentError

logger = logging.getLogger(__name__)


def upwind_interfaces(values: np.ndarray) -> np.ndarray:
    """Shared edge values for elements ordered left to right.

    values: nodal values (K, r). Returns (K, 2): the (left, right) interface
    value of each element. At an interior interface the side picked by the sign
    of the average of the two one-sided values supplies the value (ties go left);
    the domain boundaries carry u = 0.
    """
    left_edge, right_edge = boundary_values(np.asarray(values, dtype=float))
    u_minus = right_edge[:-1]  # left neighbour's right edge
    u_plus = left_edge[1:]  # right neighbour's left edge
    shared = np.where(0.5 * (u_minus + u_plus) >= 0.0, u_minus, u_plus)

    interfaces = np.zeros(values.shape[:-1] + (2,))
    interfaces[1:, 0] = shared
    interfaces[:-1, 1] = shared
    return interfaces


def ordered_elements(mesh: ElementMesh) -> list:
    """Live elements of a 1D mesh sorted by position; checks they are contiguous."""
    if mesh.dimension != 1:
        raise InvalidArgumentError("physical-space coupling is implemented for 1D meshes only")
    elements = sorted(mesh.elements, key=lambda e: e.lower[0])
    for left, right in zip(elements, elements[1:]):
        if left.upper[0] != right.lower[0]:
            raise IncompleteCouplingError(f"elements {left.id} and {right.id} do not share an interface")
    return elements


def burgers_interface_exchange(mesh: ElementMesh, states: Mapping[int, np.ndarray]) -> dict[int, np.ndarray]:
    """Interface values per element edge, keyed by element id."""
    elements = ordered_elements(mesh)
    missing = [e.id for e in elements if e.id not in states]
    if missing:
        raise IncompleteCouplingError(f"no nodal values for elements {missing}")
    values = np.stack([np.asarray(states[e.id], dtype=float) for e in elements])
    interfaces = upwind_interfaces(values)
    return {e.id: interfaces[k] for k, e in enumerate(elements)}


def burgers_rhs(values: np.ndarray, widths: np.ndarray) -> np.ndarray:
    """Coupled du/dt for ordered element values (K, r)."""
    return burgers_element_rhs(values, upwind_interfaces(values), widths)


def burgers_rk4_step(
    values: np.ndarray,
    widths: np.ndarray,
    element_ids: list[int],
    t: float,
    dt: float,
    threshold: float | None = None,
) -> np.ndarray:
    """One RK4 step with an interface exchange at every stage."""
    return rk4_step(values, lambda u, s: burgers_rhs(u, widths), t, dt, threshold, element_ids)
