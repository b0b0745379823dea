"""
Energy-transfer indicator and directional criteria.

For the reduced energy E_p0(u) = sum_{|j| <= p0} u_j^2 the indicator is the
rate of change of E_p0(u_hat) - E_p0(u_tilde):

    Q = 2 sum_{|j| <= p0} ( u_hat_j   <L(sum_{|i|<=p}  u_hat_i   Phi_i), Phi_j>
                          - u_tilde_j <L(sum_{|i|<=p0} u_tilde_i Phi_i), Phi_j> )

Each summand is kept separately ("transfer terms", one per reduced index) so
that the directional criteria can pick out the univariate indices:

    s1_i = int_D | term_{p0 e_i} | dx
    s2_i = int_D | sum_{n=1..p0} term_{n e_i} | dx

and the element-level quantity is the spatial integral summed over state
variables, Qbold = sum_v int_D |Q_v| dx.

Single-system variant: u_tilde_j := u_hat_j for |j| <= p0 (only the full system
is evolved). Two-system variant: u_tilde comes from a co-evolved reduced system.
"""

import numpy as np

from models.base_model import StochasticModel
from models.burgers import local_advection_rate
from spectral.basis import MultiIndexSet, basis_matrix
from spectral.discretization import LocalDiscretization
from spectral.grids import CollocationGrid
from tools.errors import InvalidPolicyError
from tools.structured_outputs import Criterion, ReducedOrderPolicy


def check_policy(policy: ReducedOrderPolicy, disc: LocalDiscretization) -> None:
    if policy.p0 > policy.p:
        raise InvalidPolicyError(f"p0={policy.p0} exceeds p={policy.p}")
    if policy.p != disc.p:
        raise InvalidPolicyError(f"policy degree p={policy.p} does not match the discretization (p={disc.p})")


def truncated_energy(coefficients: np.ndarray, index_set: MultiIndexSet, p0: int) -> np.ndarray:
    """E_p0 = sum_{|j| <= p0} u_j^2 over the last (basis) axis."""
    n_reduced = index_set.reduced_size(p0)
    return np.sum(np.asarray(coefficients)[..., :n_reduced] ** 2, axis=-1)


def projected_rate(
    model: StochasticModel,
    disc: LocalDiscretization,
    t: float,
    nodes: np.ndarray,
    values: np.ndarray,
    n_basis: int,
) -> np.ndarray:
    """<L(u), Phi_j> for the first n_basis functions, by the element quadrature."""
    return disc.project(model.rhs(values, t, nodes), n_basis=n_basis)


def transfer_terms(
    full_coefficients: np.ndarray,
    full_rate: np.ndarray,
    reduced_coefficients: np.ndarray,
    reduced_rate: np.ndarray,
) -> np.ndarray:
    """Per-index contributions 2 (u_hat_j <L_full, Phi_j> - u_tilde_j <L_red, Phi_j>)."""
    n_reduced = reduced_rate.shape[-1]
    return 2.0 * (full_coefficients[..., :n_reduced] * full_rate - reduced_coefficients * reduced_rate)


def element_transfer_terms(
    model: StochasticModel,
    disc: LocalDiscretization,
    policy: ReducedOrderPolicy,
    t: float,
    nodes: np.ndarray,
    coefficients: np.ndarray,
    full_values: np.ndarray | None = None,
    reduced: tuple[np.ndarray, np.ndarray] | None = None,
) -> np.ndarray:
    """Transfer terms of stacked elements.

    coefficients: (..., v, x, b); full_values: nodal solution (..., n, v, x)
    (collocation mode), or None to evaluate the expansion (Galerkin mode);
    reduced: (u_tilde, <L(u_tilde), Phi_j>) from a co-evolved reduced system,
    or None for the single-system variant.
    """
    check_policy(policy, disc)
    n_reduced = disc.index_set.reduced_size(policy.p0)
    if full_values is None:
        full_values = disc.evaluate(coefficients)
    full_rate = projected_rate(model, disc, t, nodes, full_values, n_reduced)

    if reduced is not None:
        reduced_coefficients, reduced_rate = reduced
    elif policy.p0 >= policy.p:
        reduced_coefficients, reduced_rate = coefficients, full_rate
    else:
        reduced_coefficients = coefficients[..., :n_reduced]
        reduced_values = disc.evaluate(reduced_coefficients)
        reduced_rate = projected_rate(model, disc, t, nodes, reduced_values, n_reduced)
    return transfer_terms(coefficients, full_rate, reduced_coefficients, reduced_rate)


def _integrate(values: np.ndarray, spatial_weights: np.ndarray) -> np.ndarray:
    """sum over variables of int_D |values| dx; values (..., v, x) -> (...)."""
    return np.einsum("...vx,x->...", np.abs(values), spatial_weights)


def indicator_q(terms: np.ndarray, spatial_weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Q per (variable, dof) and the integrated Qbold per element."""
    q = terms.sum(axis=-1)
    return q, _integrate(q, spatial_weights)


def directional_s1(
    terms: np.ndarray,
    index_set: MultiIndexSet,
    p0: int,
    spatial_weights: np.ndarray,
) -> np.ndarray:
    """s1_i from the single index p0 e_i; returns (..., d)."""
    positions = [index_set.axis_position(dim, p0) for dim in range(index_set.d)]
    return np.stack([_integrate(terms[..., pos], spatial_weights) for pos in positions], axis=-1)


def directional_s2(
    terms: np.ndarray,
    index_set: MultiIndexSet,
    p0: int,
    spatial_weights: np.ndarray,
) -> np.ndarray:
    """s2_i from the indices n e_i, n = 1..p0; returns (..., d)."""
    s = []
    for dim in range(index_set.d):
        positions = [index_set.axis_position(dim, n) for n in range(1, p0 + 1)]
        s.append(_integrate(terms[..., positions].sum(axis=-1), spatial_weights))
    return np.stack(s, axis=-1)


def directional(
    terms: np.ndarray,
    index_set: MultiIndexSet,
    p0: int,
    spatial_weights: np.ndarray,
    criterion: Criterion,
) -> np.ndarray:
    if criterion == Criterion.S1:
        return directional_s1(terms, index_set, p0, spatial_weights)
    return directional_s2(terms, index_set, p0, spatial_weights)


# =============================================================================
# SPECIAL ROUTES
# =============================================================================
def linear_ode_indicator(
    values: np.ndarray,
    grid: CollocationGrid,
    index_set: MultiIndexSet,
    p0: int,
    kappa: np.ndarray,
) -> float:
    """Single-system Q for du/dt = -kappa u written out as two sums.

    The first sum uses the nodal solution u(z_j), the second the truncated
    expansion at the same nodes; Q is their difference.
    """
    values = np.asarray(values, dtype=float).reshape(-1)
    kappa = np.asarray(kappa, dtype=float).reshape(-1)
    phi = basis_matrix(index_set, grid.local_nodes)
    weights = grid.weights
    n_reduced = index_set.reduced_size(p0)

    coefficients = np.array([np.sum(values * phi[:, i] * weights) for i in range(len(index_set))])
    truncated = phi[:, :n_reduced] @ coefficients[:n_reduced]

    q_full = 0.0
    q_reduced = 0.0
    for i in range(n_reduced):
        q_full += 2.0 * coefficients[i] * np.sum(-kappa * values * phi[:, i] * weights)
        q_reduced += 2.0 * coefficients[i] * np.sum(-kappa * truncated * phi[:, i] * weights)
    return float(q_full - q_reduced)


def burgers_transfer_terms(
    values: np.ndarray,
    widths: np.ndarray,
    disc: LocalDiscretization,
    policy: ReducedOrderPolicy,
) -> np.ndarray:
    """Transfer terms of the element-local Legendre expansion in x (1D Burgers).

    values: nodal values (K, r) on the Gauss points of each element; the local
    operator is L(u) = -u u_x with element-local differentiation.
    """
    check_policy(policy, disc)
    n_reduced = disc.index_set.reduced_size(policy.p0)
    nodal = np.asarray(values, dtype=float)[..., None, None]  # (K, r, 1, 1)
    coefficients = disc.project(nodal)
    full_rate = disc.project(local_advection_rate(values, widths)[..., None, None], n_basis=n_reduced)
    if policy.p0 >= policy.p:
        return transfer_terms(coefficients, full_rate, coefficients, full_rate)
    reduced_coefficients = coefficients[..., :n_reduced]
    reduced_values = disc.evaluate(reduced_coefficients)[..., 0, 0]
    reduced_rate = disc.project(
        local_advection_rate(reduced_values, widths)[..., None, None], n_basis=n_reduced
    )
    return transfer_terms(coefficients, full_rate, reduced_coefficients, reduced_rate)
