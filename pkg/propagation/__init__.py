"""
Propagation Package - time stepping in random and physical space.
"""

from propagation.integrators import check_finite, ks_semi_implicit_step, ks_step_physical, rk4_step
from propagation.physical import (
    burgers_interface_exchange,
    burgers_rhs,
    burgers_rk4_step,
    ordered_elements,
    upwind_interfaces,
)
from propagation.stochastic import (
    advance_nodes,
    evolve_batch,
    evolve_element_collocation,
    evolve_element_galerkin,
    galerkin_rhs,
)

__all__ = [
    "advance_nodes",
    "burgers_interface_exchange",
    "burgers_rhs",
    "burgers_rk4_step",
    "check_finite",
    "evolve_batch",
    "evolve_element_collocation",
    "evolve_element_galerkin",
    "galerkin_rhs",
    "ks_semi_implicit_step",
    "ks_step_physical",
    "ordered_elements",
    "rk4_step",
    "upwind_interfaces",
]
