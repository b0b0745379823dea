"""
State transfer from a split parent to its children.

The parent's gPC expansion is evaluated at each child's nodes (mapped into the
parent's local coordinates). In collocation mode those values are the child
state; in Galerkin mode they are projected onto the child basis by the child
quadrature. Both are exact when the parent state is a polynomial of degree <= p.
"""

import numpy as np

from mesh.elements import Element
from spectral.basis import basis_matrix
from spectral.discretization import LocalDiscretization
from tools.structured_outputs import PropagationMode


def parent_values_at_children(
    parent: Element,
    children: list[Element],
    coefficients: np.ndarray,
    disc: LocalDiscretization,
) -> dict[int, np.ndarray]:
    """Parent expansion (v, x, b) evaluated at every child's nodes -> (n, v, x) per child."""
    values = {}
    for child in children:
        local = parent.to_local(disc.global_nodes(child))
        phi = basis_matrix(disc.index_set, local)
        values[child.id] = disc.evaluate(coefficients, basis=phi)
    return values


def transfer_children(
    parent: Element,
    children: list[Element],
    state: np.ndarray,
    disc: LocalDiscretization,
    mode: PropagationMode,
) -> dict[int, np.ndarray]:
    """Child states keyed by child id.

    state: nodal values (n, v, x) in collocation mode, coefficients (v, x, b)
    in Galerkin mode. A coefficient axis shorter than the basis is treated as a
    reduced expansion and stays reduced.
    """
    state = np.asarray(state, dtype=float)
    if mode == PropagationMode.COLLOCATION:
        coefficients = disc.project(state)
        return parent_values_at_children(parent, children, coefficients, disc)

    n_basis = state.shape[-1]
    values = parent_values_at_children(parent, children, state, disc)
    return {child_id: disc.project(child_values, n_basis=n_basis) for child_id, child_values in values.items()}
