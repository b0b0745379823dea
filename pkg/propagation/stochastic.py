"""
Stochastic propagation - advance element states in random space.

Two modes:
- collocation: every node is an independent deterministic run of the model at
  its realization; the state is the nodal array (n_nodes, n_vars, n_dofs)
- galerkin: the coefficients (n_vars, n_dofs, n_basis) evolve under the
  pseudo-spectral projection of the model RHS:

      du_i/dt = sum_j L(sum_m u_m Phi_m(z_j), z_j) Phi_i(z_j) w_j

Batched variants take stacked element arrays (leading element axis) and spread
chunks of elements over an optional executor.
"""

import logging
from concurrent.futures import Executor
from typing import Sequence

import numpy as np

from mesh.elements import Element
from models.base_model import StochasticModel
from propagation.integrators import check_finite, ks_step_physical, rk4_step
from spectral.discretization import GpcState, LocalDiscretization
from spectral.grids import CollocationGrid
from tools.errors import InvalidArgumentError
from tools.structured_outputs import PropagationMode

logger = logging.getLogger(__name__)


def advance_nodes(
    model: StochasticModel,
    values: np.ndarray,
    xi: np.ndarray,
    t: float,
    dt: float,
    threshold: float | None = None,
    element_ids: Sequence[int] | None = None,
    check: bool = True,
) -> np.ndarray:
    """Advance independent realizations: values (..., v, x) at points xi (..., d)."""
    if model.time_scheme == "semi-implicit-spectral":
        alpha = model.alpha(xi)[..., None]
        result = ks_step_physical(values, alpha, dt, nonlinear=model.nonlinear)
        if check:
            check_finite(result, t + dt, threshold, element_ids, xi)
        return result
    return rk4_step(values, lambda u, s: model.rhs(u, s, xi), t, dt, threshold, element_ids, xi, check=check)


def galerkin_rhs(
    coefficients: np.ndarray,
    t: float,
    model: StochasticModel,
    disc: LocalDiscretization,
    nodes: np.ndarray,
) -> np.ndarray:
    """Pseudo-spectral Galerkin RHS; a shorter coefficient axis gives the reduced system."""
    values = disc.evaluate(coefficients)
    return disc.project(model.rhs(values, t, nodes), n_basis=coefficients.shape[-1])


def _require_explicit(model: StochasticModel) -> None:
    if model.time_scheme != "rk4":
        raise InvalidArgumentError(f"Galerkin propagation is not available for '{model.name}'")


def evolve_element_collocation(
    grid: CollocationGrid,
    model: StochasticModel,
    values: np.ndarray,
    t: float,
    dt: float,
    threshold: float | None = None,
) -> np.ndarray:
    """Advance the nodal values of one element from t to t + dt."""
    result = advance_nodes(model, values[None], grid.nodes[None], t, dt, threshold, [grid.element_id])
    return result[0]


def evolve_element_galerkin(
    element: Element,
    state: GpcState,
    model: StochasticModel,
    disc: LocalDiscretization,
    t: float,
    dt: float,
    threshold: float | None = None,
) -> GpcState:
    """RK4 on the coupled coefficient system of one element."""
    _require_explicit(model)
    if state.coefficients.shape[-1] != disc.n_basis:
        raise InvalidArgumentError(
            f"{state.coefficients.shape[-1]} coefficients for {disc.n_basis} basis functions"
        )
    nodes = disc.global_nodes(element)
    coefficients = rk4_step(
        state.coefficients[None],
        lambda c, s: galerkin_rhs(c, s, model, disc, nodes[None]),
        t, dt, threshold, [element.id],
    )
    return GpcState(element_id=element.id, coefficients=coefficients[0])


# =============================================================================
# BATCHED PROPAGATION
# =============================================================================
def _chunks(n_elements: int, workers: int) -> list[np.ndarray]:
    return [chunk for chunk in np.array_split(np.arange(n_elements), max(1, workers)) if chunk.size]


def evolve_batch(
    mode: PropagationMode,
    model: StochasticModel,
    disc: LocalDiscretization,
    states: np.ndarray,
    nodes: np.ndarray,
    element_ids: Sequence[int],
    t: float,
    dt: float,
    threshold: float | None = None,
    executor: Executor | None = None,
    workers: int = 1,
) -> np.ndarray:
    """Advance stacked element states one step.

    states: (K, n, v, x) nodal values in collocation mode, (K, v, x, b)
    coefficients in Galerkin mode; nodes: (K, n, d) global node coordinates.
    """
    if mode == PropagationMode.GALERKIN:
        _require_explicit(model)

    element_ids = np.asarray(element_ids)

    def run(chunk: np.ndarray) -> np.ndarray:
        if mode == PropagationMode.COLLOCATION:
            return advance_nodes(model, states[chunk], nodes[chunk], t, dt, threshold, element_ids[chunk])
        chunk_nodes = nodes[chunk]
        return rk4_step(
            states[chunk],
            lambda c, s: galerkin_rhs(c, s, model, disc, chunk_nodes),
            t, dt, threshold, element_ids[chunk],
        )

    chunks = _chunks(len(element_ids), workers if executor is not None else 1)
    if executor is None or len(chunks) == 1:
        return run(np.arange(len(element_ids)))
    results = list(executor.map(run, chunks))
    return np.concatenate(results, axis=0)
