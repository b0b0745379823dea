"""
Tests for propagation/ - integrators, random-space and physical-space stepping.

Run with: pytest tests/test_propagation.py -v
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from mesh import ElementMesh, decompose_uniform
from models import KuramotoSivashinskyModel, LinearODEModel, initial_condition, initial_profile, ks_rhs
from propagation import (
    burgers_interface_exchange,
    burgers_rhs,
    burgers_rk4_step,
    check_finite,
    evolve_batch,
    evolve_element_collocation,
    evolve_element_galerkin,
    ks_semi_implicit_step,
    ks_step_physical,
    rk4_step,
    upwind_interfaces,
)
from spectral import GpcState, LocalDiscretization
from tools.errors import IncompleteCouplingError, InvalidArgumentError, NumericalBlowupError
from tools.structured_outputs import PropagationMode


# =============================================================================
# INTEGRATORS
# =============================================================================
def test_rk4_is_fourth_order_taylor_for_linear_decay():
    h = 0.1
    result = rk4_step(np.array([1.0]), lambda u, t: -u, 0.0, h)
    assert result[0] == pytest.approx(1.0 - h + h ** 2 / 2 - h ** 3 / 6 + h ** 4 / 24, abs=1e-15)


def test_rk4_global_error_falls_sixteenfold_when_step_halves():
    def error(dt):
        u = np.array([1.0])
        n_steps = int(round(1.0 / dt))
        for step in range(n_steps):
            u = rk4_step(u, lambda v, t: -v, step * dt, dt)
        return abs(u[0] - np.exp(-1.0))

    assert 14.0 <= error(0.1) / error(0.05) <= 18.0


def test_check_finite_reports_element_and_node():
    values = np.zeros((2, 3, 1, 1))
    values[1, 2, 0, 0] = np.inf
    nodes = np.arange(6, dtype=float).reshape(2, 3, 1)
    with pytest.raises(NumericalBlowupError) as info:
        check_finite(values, 0.25, element_ids=[7, 9], nodes=nodes)
    assert info.value.element_id == 9
    assert info.value.time == 0.25
    assert info.value.node == (5.0,)


def test_check_finite_threshold():
    check_finite(np.array([1.0, -2.0]), 0.0, threshold=2.0)
    with pytest.raises(NumericalBlowupError):
        check_finite(np.array([1.0, -2.5]), 0.0, threshold=2.0)


def test_rk4_without_check_returns_non_finite():
    result = rk4_step(np.array([1e200]), lambda u, t: u * u, 0.0, 1.0, check=False)
    assert not np.all(np.isfinite(result))


def test_ks_linear_step_is_exact():
    n = 32
    x = 2.0 * np.pi * np.arange(n) / n
    dt = 0.01
    result = ks_step_physical(np.cos(x), 13.0, dt, nonlinear=False)
    np.testing.assert_allclose(result, np.exp(9.0 * dt) * np.cos(x), atol=1e-12)


def test_ks_fourier_step_keeps_constant_state():
    n = 16
    u_hat = np.fft.rfft(np.full(n, 0.3))
    np.testing.assert_allclose(ks_semi_implicit_step(u_hat, 15.0, 0.01, n), u_hat, atol=1e-13)


def test_ks_fourier_step_matches_nonlinear_rhs_for_small_dt():
    n = 32
    x = 2.0 * np.pi * np.arange(n) / n
    u = 0.01 * np.cos(x)
    dt = 1e-6
    stepped = ks_step_physical(u, 15.0, dt)
    np.testing.assert_allclose((stepped - u) / dt, ks_rhs(u, 15.0), atol=1e-5)


def test_ks_steps_conserve_spatial_mean():
    model = KuramotoSivashinskyModel(n_modes=64)
    u = initial_profile(model.x)
    for _ in range(500):
        u = ks_step_physical(u, 17.0, 1e-3)
    assert np.all(np.isfinite(u))
    assert np.mean(u) == pytest.approx(0.0, abs=1e-12)


# =============================================================================
# RANDOM SPACE
# =============================================================================
def test_collocation_matches_exact_linear_ode():
    model = LinearODEModel()
    disc = LocalDiscretization(1, 4)
    element = decompose_uniform(1, [2]).get(1)
    grid = disc.grid(element)
    values = model.initial_state(grid.nodes)
    dt = 0.01
    for step in range(100):
        values = evolve_element_collocation(grid, model, values, step * dt, dt)
    np.testing.assert_allclose(values, model.exact_solution(grid.nodes, 1.0), rtol=1e-9)


def test_galerkin_mean_matches_exact_linear_ode():
    model = LinearODEModel()
    disc = LocalDiscretization(1, 5)
    element = decompose_uniform(1, [1]).get(1)
    state = GpcState(element.id, disc.project(model.initial_state(disc.global_nodes(element))))
    dt = 0.01
    for step in range(100):
        state = evolve_element_galerkin(element, state, model, disc, step * dt, dt)
    # E[exp(-kappa)] = sinh(1)
    assert state.mean[0, 0] == pytest.approx(np.sinh(1.0), rel=1e-6)
    assert state.second_moment[0, 0] == pytest.approx(np.sinh(2.0) / 2.0, rel=1e-5)


def test_galerkin_rejects_spectral_scheme():
    model = KuramotoSivashinskyModel(n_modes=16)
    disc = LocalDiscretization(1, 2)
    element = decompose_uniform(1, [1]).get(1)
    state = GpcState(element.id, np.zeros((1, 16, disc.n_basis)))
    with pytest.raises(InvalidArgumentError):
        evolve_element_galerkin(element, state, model, disc, 0.0, 0.01)


def test_galerkin_rejects_wrong_basis_size():
    disc = LocalDiscretization(1, 3)
    element = decompose_uniform(1, [1]).get(1)
    with pytest.raises(InvalidArgumentError):
        evolve_element_galerkin(element, GpcState(1, np.zeros((1, 1, 2))), LinearODEModel(), disc, 0.0, 0.1)


@pytest.mark.parametrize("mode", [PropagationMode.COLLOCATION, PropagationMode.GALERKIN])
def test_batch_with_executor_matches_serial(mode):
    model = LinearODEModel()
    disc = LocalDiscretization(1, 3)
    mesh = decompose_uniform(1, [5])
    nodes = np.stack([disc.global_nodes(e) for e in mesh])
    values = model.initial_state(nodes)
    states = values if mode == PropagationMode.COLLOCATION else disc.project(values)

    serial = evolve_batch(mode, model, disc, states, nodes, mesh.ids, 0.0, 0.05)
    with ThreadPoolExecutor(max_workers=3) as executor:
        parallel = evolve_batch(mode, model, disc, states, nodes, mesh.ids, 0.0, 0.05, executor=executor, workers=3)
    np.testing.assert_allclose(serial, parallel, rtol=1e-14)


def test_batch_blowup_names_element():
    model = LinearODEModel()
    disc = LocalDiscretization(1, 2)
    mesh = decompose_uniform(1, [2])
    nodes = np.stack([disc.global_nodes(e) for e in mesh])
    states = model.initial_state(nodes)
    with pytest.raises(NumericalBlowupError) as info:
        evolve_batch(PropagationMode.COLLOCATION, model, disc, states, nodes, mesh.ids, 0.0, 1.0, threshold=1.5)
    # growth happens for kappa < 0, i.e. the left element
    assert info.value.element_id == 1


def test_ks_nodes_advance_with_their_own_alpha():
    model = KuramotoSivashinskyModel(n_modes=32, nonlinear=False)
    disc = LocalDiscretization(1, 1)
    element = decompose_uniform(1, [1]).get(1)
    grid = disc.grid(element)
    values = np.broadcast_to(np.cos(model.x), (2, 1, 32)).copy()
    result = evolve_element_collocation(grid, model, values, 0.0, 0.01)
    alpha = model.alpha(grid.nodes)
    for k in range(2):
        np.testing.assert_allclose(result[k, 0], np.exp((alpha[k] - 4.0) * 0.01) * np.cos(model.x), atol=1e-12)


# =============================================================================
# PHYSICAL SPACE
# =============================================================================
def test_upwind_interfaces_follow_average_sign():
    positive = upwind_interfaces(np.array([[1.0, 1.0], [2.0, 2.0]]))
    np.testing.assert_allclose(positive, [[0.0, 1.0], [1.0, 0.0]])
    negative = upwind_interfaces(np.array([[-1.0, -1.0], [-2.0, -2.0]]))
    np.testing.assert_allclose(negative, [[0.0, -2.0], [-2.0, 0.0]])


def test_interface_exchange_requires_every_element():
    mesh = decompose_uniform(1, [3])
    with pytest.raises(IncompleteCouplingError):
        burgers_interface_exchange(mesh, {1: np.zeros(3), 2: np.zeros(3)})
    exchanged = burgers_interface_exchange(mesh, {i: np.full(3, 0.5) for i in mesh.ids})
    np.testing.assert_allclose(exchanged[2], [0.5, 0.5])


def test_interface_exchange_requires_contiguous_mesh():
    mesh = ElementMesh(dimension=1)
    mesh.add([-1.0], [0.0])
    mesh.add([0.5], [1.0])
    with pytest.raises(IncompleteCouplingError):
        burgers_interface_exchange(mesh, {1: np.zeros(3), 2: np.zeros(3)})


def test_burgers_rhs_conserves_total_mass():
    mesh = decompose_uniform(1, [6])
    disc = LocalDiscretization(1, 4)
    values = np.stack([initial_condition(disc.global_nodes(e)[:, 0]) + 0.3 for e in mesh])
    widths = np.array([e.width[0] for e in mesh])
    rhs = burgers_rhs(values, widths)
    # zero boundary values: the interior fluxes telescope, the boundary ones vanish
    weights = 2.0 * disc.weights
    assert np.sum(0.5 * widths * (rhs @ weights)) == pytest.approx(0.0, abs=1e-11)


def test_burgers_smooth_solution_matches_characteristics():
    mesh = decompose_uniform(1, [8])
    disc = LocalDiscretization(1, 5)
    x = np.stack([disc.global_nodes(e)[:, 0] for e in mesh])
    values = initial_condition(x)
    widths = np.array([e.width[0] for e in mesh])
    dt, t_final = 1e-4, 0.05
    for step in range(int(round(t_final / dt))):
        values = burgers_rk4_step(values, widths, mesh.ids, step * dt, dt)

    # u = sin(2 pi (x - u t)) by fixed-point iteration (contraction for t < 1/(2 pi))
    exact = initial_condition(x)
    for _ in range(200):
        exact = initial_condition(x - exact * t_final)
    np.testing.assert_allclose(values, exact, atol=1e-2)
