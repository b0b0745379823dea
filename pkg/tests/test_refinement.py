"""
Tests for refinement/ - indicator, directional criteria, transfer, refine_step.

Run with: pytest tests/test_refinement.py -v
"""

from dataclasses import dataclass, field

import numpy as np
import pytest
from pydantic import ValidationError

from mesh import decompose_uniform
from models import LinearODEModel
from refinement import (
    burgers_transfer_terms,
    directional,
    directional_s1,
    directional_s2,
    element_transfer_terms,
    indicator_q,
    linear_ode_indicator,
    refine_step,
    select_split_dims,
    transfer_children,
    truncated_energy,
)
from spectral import LocalDiscretization, basis_matrix, total_degree_indices
from tools.errors import IncompleteInputError, InvalidPolicyError
from tools.structured_outputs import (
    Criterion,
    PropagationMode,
    ReducedOrderPolicy,
    Tolerances,
    default_reduced_degree,
)


def _ode_state(disc, element, t):
    model = LinearODEModel()
    nodes = disc.global_nodes(element)
    return model, nodes, model.exact_solution(nodes, t)


# =============================================================================
# POLICY
# =============================================================================
@pytest.mark.parametrize("p,p0", [(1, 0), (2, 1), (5, 3), (7, 4), (9, 5)])
def test_default_reduced_degree(p, p0):
    assert default_reduced_degree(p) == p0


def test_policy_requires_reduced_below_full():
    with pytest.raises(ValidationError):
        ReducedOrderPolicy(p=5, p0=5)
    assert ReducedOrderPolicy.for_degree(7).p0 == 4


def test_reduced_degree_above_full_is_rejected():
    disc = LocalDiscretization(1, 5)
    element = decompose_uniform(1, [1]).get(1)
    model, nodes, values = _ode_state(disc, element, 1.0)
    policy = ReducedOrderPolicy.model_construct(p=5, p0=6)
    with pytest.raises(InvalidPolicyError):
        element_transfer_terms(model, disc, policy, 1.0, nodes[None], disc.project(values)[None], values[None])


def test_policy_must_match_discretization():
    disc = LocalDiscretization(1, 4)
    element = decompose_uniform(1, [1]).get(1)
    model, nodes, values = _ode_state(disc, element, 1.0)
    with pytest.raises(InvalidPolicyError):
        element_transfer_terms(model, disc, ReducedOrderPolicy(p=5, p0=3), 1.0, nodes[None],
                               disc.project(values)[None], values[None])


# =============================================================================
# INDICATOR
# =============================================================================
def test_indicator_vanishes_when_reduced_equals_full():
    disc = LocalDiscretization(1, 5)
    element = decompose_uniform(1, [2]).get(1)
    model, nodes, values = _ode_state(disc, element, 3.0)
    policy = ReducedOrderPolicy.model_construct(p=5, p0=5)
    terms = element_transfer_terms(model, disc, policy, 3.0, nodes[None], disc.project(values)[None], values[None])
    q, q_bold = indicator_q(terms, model.spatial_weights)
    assert np.all(q == 0.0)
    assert q_bold[0] == 0.0


def test_indicator_vanishes_for_constant_state():
    disc = LocalDiscretization(1, 5)
    element = decompose_uniform(1, [1]).get(1)
    model = LinearODEModel()
    nodes = disc.global_nodes(element)
    values = model.initial_state(nodes)
    terms = element_transfer_terms(model, disc, ReducedOrderPolicy.for_degree(5), 0.0, nodes[None],
                                   disc.project(values)[None], values[None])
    _, q_bold = indicator_q(terms, model.spatial_weights)
    assert q_bold[0] == pytest.approx(0.0, abs=1e-14)


def test_indicator_positive_for_growing_solution():
    disc = LocalDiscretization(1, 5)
    element = decompose_uniform(1, [1]).get(1)
    model, nodes, values = _ode_state(disc, element, 5.0)
    terms = element_transfer_terms(model, disc, ReducedOrderPolicy.for_degree(5), 5.0, nodes[None],
                                   disc.project(values)[None], values[None])
    _, q_bold = indicator_q(terms, model.spatial_weights)
    assert q_bold[0] > 0.0


@pytest.mark.parametrize("lower,upper,t", [(-1.0, 1.0, 2.0), (-1.0, -0.5, 6.0), (0.25, 0.5, 10.0)])
def test_linear_ode_route_matches_quadrature_route(lower, upper, t):
    mesh = decompose_uniform(1, [1])
    element = mesh.add([lower], [upper])
    p, p0 = 6, 3
    disc = LocalDiscretization(1, p)
    model, nodes, values = _ode_state(disc, element, t)

    terms = element_transfer_terms(model, disc, ReducedOrderPolicy(p=p, p0=p0), t, nodes[None],
                                   disc.project(values)[None], values[None])
    generic = float(terms.sum(axis=-1)[0, 0, 0])
    explicit = linear_ode_indicator(values[:, 0, 0], disc.grid(element), disc.index_set, p0,
                                    model.parameters(nodes)[:, 0])
    assert explicit == pytest.approx(generic, rel=1e-10, abs=1e-12)


def test_galerkin_and_collocation_terms_agree_on_polynomial_state():
    disc = LocalDiscretization(1, 4)
    element = decompose_uniform(1, [1]).get(1)
    model = LinearODEModel()
    nodes = disc.global_nodes(element)
    values = (1.0 + nodes[:, 0] - 0.5 * nodes[:, 0] ** 3)[:, None, None]
    coefficients = disc.project(values)[None]
    policy = ReducedOrderPolicy.for_degree(4)
    nodal = element_transfer_terms(model, disc, policy, 0.0, nodes[None], coefficients, values[None])
    modal = element_transfer_terms(model, disc, policy, 0.0, nodes[None], coefficients)
    np.testing.assert_allclose(nodal, modal, atol=1e-13)


def test_truncated_energy():
    index_set = total_degree_indices(1, 4)
    coefficients = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    assert truncated_energy(coefficients, index_set, 2) == pytest.approx(14.0)


@pytest.mark.parametrize("p0", [0, 2, 4])
def test_truncated_energy_is_second_moment_of_truncation(p0):
    disc = LocalDiscretization(2, 4)
    rng = np.random.default_rng(3)
    coefficients = rng.normal(size=(2, 3, disc.n_basis))
    n_reduced = disc.index_set.reduced_size(p0)
    _, second = disc.conditional_moments(disc.evaluate(coefficients[..., :n_reduced]))
    np.testing.assert_allclose(truncated_energy(coefficients, disc.index_set, p0), second, rtol=1e-12)


@pytest.mark.parametrize("p,lower,upper", [(5, -1.0, 0.0), (6, 0.25, 0.75), (9, -1.0, 1.0)])
def test_linear_ode_indicator_couples_only_across_the_cut(p, lower, upper):
    # kappa = c + h z couples Phi_p0 to Phi_p0+1 with <z Phi_n, Phi_n+1> = (n+1) / sqrt((2n+1)(2n+3))
    mesh = decompose_uniform(1, [1])
    element = mesh.add([lower], [upper])
    disc = LocalDiscretization(1, p)
    policy = ReducedOrderPolicy.for_degree(p)
    p0 = policy.p0
    h = 0.5 * (upper - lower)
    coefficients = np.random.default_rng(p).normal(size=(1, 1, disc.n_basis))
    nodes = disc.global_nodes(element)

    terms = element_transfer_terms(LinearODEModel(), disc, policy, 0.0, nodes[None], coefficients[None])
    q, q_bold = indicator_q(terms, np.ones(1))
    beta = (p0 + 1) / np.sqrt((2 * p0 + 1) * (2 * p0 + 3))
    expected = -2.0 * h * beta * coefficients[0, 0, p0] * coefficients[0, 0, p0 + 1]
    assert q[0, 0, 0] == pytest.approx(expected, rel=1e-10, abs=1e-13)
    assert q_bold[0] == pytest.approx(abs(expected), rel=1e-10, abs=1e-13)


def test_indicator_sums_variables_and_weights():
    terms = np.zeros((1, 2, 3, 2))
    terms[0, 0, :, 0] = [1.0, -2.0, 0.5]
    terms[0, 1, :, 1] = [-1.0, 0.0, 0.0]
    q, q_bold = indicator_q(terms, np.array([1.0, 0.5, 2.0]))
    assert q.shape == (1, 2, 3)
    assert q_bold[0] == pytest.approx(1.0 + 1.0 + 1.0 + 1.0)


# =============================================================================
# DIRECTIONAL CRITERIA
# =============================================================================
def _directional_terms():
    index_set = total_degree_indices(2, 3)
    p0 = 2
    terms = np.zeros((1, 1, 1, index_set.reduced_size(p0)))
    terms[..., index_set.position((1, 0))] = 1.0
    terms[..., index_set.position((2, 0))] = -3.0
    terms[..., index_set.position((1, 1))] = 10.0  # mixed index: ignored by both criteria
    terms[..., index_set.position((0, 1))] = 0.5
    return terms, index_set, p0


def test_directional_s1_uses_highest_axis_index():
    terms, index_set, p0 = _directional_terms()
    s = directional_s1(terms, index_set, p0, np.ones(1))
    np.testing.assert_allclose(s[0], [3.0, 0.0])


def test_directional_s2_sums_axis_indices():
    terms, index_set, p0 = _directional_terms()
    s = directional_s2(terms, index_set, p0, np.ones(1))
    np.testing.assert_allclose(s[0], [2.0, 0.5])
    np.testing.assert_allclose(directional(terms, index_set, p0, np.ones(1), Criterion.S2), s)


def test_select_split_dims_is_inclusive():
    assert select_split_dims(np.array([1.0, 0.05, 0.1]), 0.1) == [0, 2]
    assert select_split_dims(np.array([0.3]), 0.9) == [0]
    assert select_split_dims(np.array([0.0, 0.0]), 0.1) == [0, 1]


# =============================================================================
# TRANSFER
# =============================================================================
def _poly(points):
    x, y = points[..., 0], points[..., 1]
    return x ** 2 * y + y ** 3 - 0.5 * x + 2.0


def test_collocation_transfer_exact_for_polynomials():
    disc = LocalDiscretization(2, 3)
    mesh = decompose_uniform(2, [1, 1])
    parent = mesh.get(1)
    state = _poly(disc.global_nodes(parent))[:, None, None]
    children = [mesh.get(c) for c in mesh.split(1, [0, 1])]

    child_states = transfer_children(parent, children, state, disc, PropagationMode.COLLOCATION)
    assert set(child_states) == {c.id for c in children}
    for child in children:
        np.testing.assert_allclose(child_states[child.id][:, 0, 0], _poly(disc.global_nodes(child)), atol=1e-12)


def test_galerkin_transfer_exact_for_polynomials():
    disc = LocalDiscretization(2, 3)
    mesh = decompose_uniform(2, [1, 1])
    parent = mesh.get(1)
    coefficients = disc.project(_poly(disc.global_nodes(parent))[:, None, None])
    children = [mesh.get(c) for c in mesh.split(1, [1])]

    child_states = transfer_children(parent, children, coefficients, disc, PropagationMode.GALERKIN)
    rng = np.random.default_rng(0)
    for child in children:
        points = child.to_global(rng.uniform(-1.0, 1.0, size=(100, 2)))
        phi = basis_matrix(disc.index_set, child.to_local(points))
        np.testing.assert_allclose(phi @ child_states[child.id][0, 0], _poly(points), atol=1e-12)


def test_galerkin_transfer_keeps_reduced_length():
    disc = LocalDiscretization(1, 5)
    mesh = decompose_uniform(1, [1])
    parent = mesh.get(1)
    reduced = np.arange(4, dtype=float)[None, None]
    children = [mesh.get(c) for c in mesh.split(1, [0])]
    child_states = transfer_children(parent, children, reduced, disc, PropagationMode.GALERKIN)
    assert all(state.shape == (1, 1, 4) for state in child_states.values())


# =============================================================================
# REFINE STEP
# =============================================================================
@dataclass
class FixedIndicators:
    """RefinableSystem returning preset indicator values."""
    values: dict[int, tuple[float, np.ndarray]]
    transfers: list[tuple[int, list[int]]] = field(default_factory=list)

    def indicators(self, t):
        return dict(self.values)

    def transfer(self, parent, children):
        self.transfers.append((parent.id, [c.id for c in children]))


def test_refine_step_splits_triggered_elements():
    mesh = decompose_uniform(1, [2])
    system = FixedIndicators({1: (0.2, np.array([1.0])), 2: (0.1, np.array([1.0]))})
    report = refine_step(mesh, system, Tolerances(tol1=0.1), t=0.5)

    # q_hat = q * 0.5: element 1 reaches 0.1 exactly (inclusive), element 2 does not
    assert report.n_splits == 1
    assert report.elements[0].split and report.elements[0].child_ids == [3, 4]
    assert not report.elements[1].split
    assert report.elements[1].q_hat == pytest.approx(0.05)
    assert system.transfers == [(1, [3, 4])]
    assert mesh.ids == [2, 3, 4]
    assert mesh.history[0].time == 0.5


def test_refine_step_unweighted_trigger_compares_q():
    mesh = decompose_uniform(1, [2])
    system = FixedIndicators({1: (0.2, np.array([1.0])), 2: (0.1, np.array([1.0]))})
    tolerances = Tolerances(tol1=0.1, weight_by_probability=False)
    assert tolerances.trigger(0.1, 0.5) == 0.1
    report = refine_step(mesh, system, tolerances)
    assert report.n_splits == 2
    # q_hat is still reported with the probability weight
    assert report.elements[1].q_hat == pytest.approx(0.05)
    assert len(mesh) == 4


def test_refine_step_directional_split():
    mesh = decompose_uniform(2, [1, 1])
    system = FixedIndicators({1: (1.0, np.array([1.0, 0.05]))})
    report = refine_step(mesh, system, Tolerances(tol1=0.5, tol2=0.1))
    assert report.elements[0].split_dims == [0]
    assert len(mesh) == 2
    assert mesh.splits_per_dimension() == [1, 0]


def test_refine_step_infinite_tolerance_never_splits():
    mesh = decompose_uniform(1, [3])
    system = FixedIndicators({i: (1e30, np.array([1.0])) for i in mesh.ids})
    report = refine_step(mesh, system, Tolerances(tol1=float("inf")))
    assert report.n_splits == 0
    assert len(mesh) == 3


def test_refine_step_guards_are_reported(caplog):
    mesh = decompose_uniform(1, [2])
    system = FixedIndicators({1: (10.0, np.array([1.0])), 2: (10.0, np.array([1.0]))})
    with caplog.at_level("WARNING"):
        report = refine_step(mesh, system, Tolerances(tol1=0.1, max_elements=3))
    assert [e.split for e in report.elements] == [True, False]
    assert report.elements[1].skipped_reason == "max_elements"
    assert "skipped splits" in caplog.text

    mesh = decompose_uniform(1, [1])
    report = refine_step(mesh, FixedIndicators({1: (10.0, np.array([1.0]))}), Tolerances(tol1=0.1, min_width=1.5))
    assert report.elements[0].skipped_reason == "min_width"


def test_refine_step_missing_indicator():
    mesh = decompose_uniform(1, [2])
    with pytest.raises(IncompleteInputError):
        refine_step(mesh, FixedIndicators({1: (0.0, np.array([0.0]))}), Tolerances(tol1=0.1))


# =============================================================================
# PHYSICAL SPACE
# =============================================================================
def test_burgers_terms_vanish_for_constant_state():
    disc = LocalDiscretization(1, 5, r=6)
    values = np.full((3, 6), 0.7)
    terms = burgers_transfer_terms(values, np.array([0.5, 0.5, 1.0]), disc, ReducedOrderPolicy.for_degree(5))
    np.testing.assert_allclose(terms, 0.0, atol=1e-13)


def test_burgers_terms_larger_at_steep_elements():
    mesh = decompose_uniform(1, [4])
    disc = LocalDiscretization(1, 5, r=6)
    # steep front in element 2, flat elsewhere
    values = np.stack([np.tanh(20.0 * disc.global_nodes(e)[:, 0] + 5.0) for e in mesh])
    widths = np.array([e.width[0] for e in mesh])
    terms = burgers_transfer_terms(values, widths, disc, ReducedOrderPolicy.for_degree(5))
    _, q_bold = indicator_q(terms, np.ones(1))
    assert int(np.argmax(q_bold)) == 1
