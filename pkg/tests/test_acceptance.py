"""
End-to-end runs of the benchmark experiments at desk scale.

Run with: pytest tests/test_acceptance.py -v -m slow
"""

import numpy as np
import pytest

from evaluation.experiments import compare, run_experiment
from models import BREAKING_TIME, KraichnanOrszagModel, KuramotoSivashinskyModel, initial_condition, initial_profile
from propagation import burgers_rk4_step, ks_step_physical, rk4_step
from spectral import gauss_legendre
from tools.config_file import build_config

pytestmark = pytest.mark.slow


def _run(experiment, with_reference=True, **values):
    config = build_config({"experiment": experiment, **values}).resolved()
    return run_experiment(config, with_reference=with_reference)


def _ode(**values):
    return _run("ode", reference="exact", **values)


# =============================================================================
# LINEAR ODE
# =============================================================================
def test_ode_global_gpc_error_level():
    outcome = _ode(mode="global-gpc", p=5)
    assert outcome.summary.n_elements == 1
    assert 3.8e-3 / 3 <= outcome.summary.max_mean_error <= 3.8e-3 * 3
    assert 1.1e-1 / 3 <= outcome.summary.max_variance_error <= 1.1e-1 * 3


@pytest.mark.parametrize("mode", ["amr-collocation", "amr-galerkin"])
def test_ode_amr_element_count_and_error(mode):
    outcome = _ode(mode=mode, p=5, tol1=0.1)
    assert 10 <= outcome.summary.n_elements <= 25
    assert outcome.summary.max_variance_error <= 5e-3


def test_ode_higher_order_amr_error():
    outcome = _ode(p=7, tol1=1e-2)
    assert outcome.summary.max_variance_error <= 1e-4


@pytest.mark.parametrize("mode", ["amr-collocation", "amr-galerkin"])
def test_ode_amr_beats_global_and_refines_left(mode):
    global_run = _ode(mode="global-gpc", p=5)
    outcome = _ode(mode=mode, p=5, tol1=0.1)
    assert outcome.summary.max_variance_error < global_run.summary.max_variance_error

    # exp(-kappa t) grows for kappa < 0, so the left half is resolved more finely
    elements = outcome.result.mesh.elements
    left = [e.width[0] for e in elements if e.center[0] < 0.0]
    right = [e.width[0] for e in elements if e.center[0] > 0.0]
    assert np.mean(left) < np.mean(right)


def test_ode_tighter_tolerance_never_coarsens():
    counts = [_ode(p=5, tol1=tol1).summary.n_elements for tol1 in (0.1, 1e-2, 1e-3)]
    assert counts == sorted(counts)


def test_ode_probability_weighted_trigger_refines_less():
    plain = _ode(p=5, tol1=0.1)
    weighted = _ode(p=5, tol1=0.1, weight_by_probability=True)
    assert 1 < weighted.summary.n_elements <= plain.summary.n_elements


# =============================================================================
# KRAICHNAN-ORSZAG
# =============================================================================
def test_ko_product_invariant_up_to_t30():
    model = KraichnanOrszagModel(1)
    xi = np.linspace(-1.0, 1.0, 21)[:, None]
    u = model.initial_state(xi)
    invariant = u[:, 0, 0] * u[:, 1, 0]
    dt = 1e-3
    for step in range(30_000):
        u = rk4_step(u, lambda v, s: model.rhs(v, s, xi), step * dt, dt)
    np.testing.assert_allclose(u[:, 0, 0] * u[:, 1, 0], invariant, atol=1e-9)


def test_ko1d_errors_fall_with_tolerance_on_a_symmetric_mesh():
    configs = [
        build_config({"experiment": "ko1d", "p": 9, "tol1": tol1, "label": f"ko1d-{tol1:g}"}).resolved()
        for tol1 in (1e-3, 1e-4, 1e-5)
    ]
    rows, outcomes = compare(configs)
    errors = [row.error for row in rows]
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] <= 1e-3

    elements = outcomes[-1].result.mesh.elements
    assert len(elements) > 2
    boundaries = np.unique(np.concatenate([[e.lower[0], e.upper[0]] for e in elements]))
    smallest = min(e.width[0] for e in elements)
    mirrored = np.abs(boundaries[:, None] + boundaries[None, :]).min(axis=1)
    assert np.all(mirrored <= smallest)


def test_ko2d_splits_follow_the_discontinuous_direction():
    outcome = _run("ko2d", with_reference=False, p=7, tol1=1e-3, tol2=0.1, t_final=10.0)
    along_xi1, along_xi2 = outcome.summary.splits_per_dimension
    assert along_xi1 > along_xi2


def test_ko3d_y1_and_y2_variances_agree():
    outcome = _run("ko3d", with_reference=False, p=5, tol1=1e-3, t_final=6.0)
    var_y1 = outcome.series.variance[:, 0, 0]
    var_y2 = outcome.series.variance[:, 1, 0]
    assert outcome.summary.n_elements >= 8
    np.testing.assert_allclose(var_y2, var_y1, rtol=1e-2)


# =============================================================================
# KURAMOTO-SIVASHINSKY
# =============================================================================
def _ks_profile(alpha, t_final, dt=1e-3, n_modes=64):
    model = KuramotoSivashinskyModel(n_modes=n_modes)
    u = initial_profile(model.x)
    profiles = {}
    for step in range(1, int(round(t_final / dt)) + 1):
        u = ks_step_physical(u, alpha, dt)
        if step % int(round(1.0 / dt)) == 0:
            profiles[int(round(step * dt))] = u.copy()
    return model, profiles


@pytest.mark.parametrize("alpha,dominant_mode", [(13.0, 1), (17.0, 2)])
def test_ks_deterministic_runs_settle(alpha, dominant_mode):
    model, profiles = _ks_profile(alpha, 10.0)
    change = np.sqrt(np.sum((profiles[10] - profiles[9]) ** 2 * model.spatial_weights))
    assert change < 1e-6
    assert np.mean(profiles[10]) == pytest.approx(0.0, abs=1e-10)
    amplitudes = np.abs(np.fft.rfft(profiles[10]))
    assert int(np.argmax(amplitudes[1:])) + 1 == dominant_mode


def test_ks_amr_run_stays_mean_free():
    outcome = _run("ks", with_reference=False, p=11, tol1=0.1, t_final=2.0)
    assert outcome.summary.n_elements >= 32
    np.testing.assert_allclose(outcome.series.mean.mean(axis=-1), 0.0, atol=1e-10)


# =============================================================================
# BURGERS
# =============================================================================
def _max_slope(values, x):
    order = np.argsort(x)
    return float(np.max(np.abs(np.diff(values[order]) / np.diff(x[order]))))


def test_burgers_breaking_time():
    assert 0.14 < BREAKING_TIME < 0.16
    nodes, _ = gauss_legendre(8)
    edges = np.linspace(-1.0, 1.0, 65)
    widths = np.diff(edges)
    x = (0.5 * (edges[:-1] + edges[1:]))[:, None] + 0.5 * widths[:, None] * nodes[None, :]
    u = initial_condition(x)
    initial_slope = _max_slope(u.ravel(), x.ravel())

    dt = 1e-5
    slopes = {}
    for step in range(1, 16_001):
        u = burgers_rk4_step(u, widths, list(range(64)), (step - 1) * dt, dt)
        if step in (14_000, 16_000):
            slopes[step] = _max_slope(u.ravel(), x.ravel())
    assert slopes[14_000] < 10.0 * initial_slope
    assert slopes[16_000] > 10.0 * initial_slope


@pytest.mark.parametrize("tol1", [1e-2, 1e-4])
def test_burgers_refinement_concentrates_at_shocks(tol1):
    outcome = _run("burgers", p=5, tol1=tol1)
    assert outcome.summary.diagnostics["shock_fraction"] >= 0.5


def test_burgers_amr_total_variation_below_global():
    adaptive = _run("burgers", p=5, tol1=1e-2)
    global_run = _run("burgers", mode="global-collocation")
    assert global_run.summary.n_points == 256
    assert adaptive.summary.diagnostics["total_variation"] < global_run.summary.diagnostics["total_variation"]


def test_burgers_large_step_completes():
    outcome = _run("burgers", p=5, tol1=1e-2, dt=1e-2)
    assert outcome.summary.steps == 16
    assert np.all(np.isfinite(outcome.result.solution["u"]))
