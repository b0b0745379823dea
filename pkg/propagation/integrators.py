"""
Fixed-step time integrators.

- rk4_step: classical four-stage Runge-Kutta for the ODE models, the Galerkin
  coefficient systems and the Burgers element systems
- ks_semi_implicit_step: integrating-factor RK2 for Kuramoto-Sivashinsky in
  Fourier space (linear part exact, quadratic part explicit)

Both check every stage against the blowup threshold and report the first
offending element (and node, when node coordinates are supplied).
"""

import logging
from typing import Callable, Sequence

import numpy as np

from config import settings
from models.kuramoto_sivashinsky import linear_symbol, nonlinear_term_hat
from tools.errors import NumericalBlowupError

logger = logging.getLogger(__name__)

RHS = Callable[[np.ndarray, float], np.ndarray]


def check_finite(
    values: np.ndarray,
    t: float,
    threshold: float | None = None,
    element_ids: Sequence[int] | None = None,
    nodes: np.ndarray | None = None,
) -> None:
    """Raise NumericalBlowupError when any entry is non-finite or above ``threshold``.

    ``element_ids`` labels axis 0 of ``values``; ``nodes`` (shaped like the
    leading axes of ``values`` plus a coordinate axis) locates the offending node.
    """
    threshold = settings.BLOWUP_THRESHOLD if threshold is None else threshold
    magnitude = np.abs(values)
    bad = ~np.isfinite(magnitude) | (magnitude > threshold)
    if not np.any(bad):
        return

    index = tuple(int(i) for i in np.argwhere(bad)[0])
    element_id = None
    if element_ids is not None and len(index) > 0:
        element_id = int(element_ids[index[0]])
    node = None
    if nodes is not None:
        node = np.asarray(nodes)[index[: np.ndim(nodes) - 1]]
    logger.error("blowup at t=%.6g, element %s, index %s", t, element_id, index)
    raise NumericalBlowupError("state is non-finite or above the blowup threshold",
                               element_id=element_id, time=t, node=node)


def rk4_step(
    state: np.ndarray,
    rhs: RHS,
    t: float,
    dt: float,
    threshold: float | None = None,
    element_ids: Sequence[int] | None = None,
    nodes: np.ndarray | None = None,
    check: bool = True,
) -> np.ndarray:
    """One classical RK4 step of du/dt = rhs(u, t).

    With check=False no blowup test is made; callers then screen the result.
    """
    def guard(values: np.ndarray, time: float) -> None:
        if check:
            check_finite(values, time, threshold, element_ids, nodes)

    k1 = rhs(state, t)
    guard(k1, t)
    k2 = rhs(state + 0.5 * dt * k1, t + 0.5 * dt)
    guard(k2, t)
    k3 = rhs(state + 0.5 * dt * k2, t + 0.5 * dt)
    guard(k3, t)
    k4 = rhs(state + dt * k3, t + dt)
    guard(k4, t)
    result = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    guard(result, t + dt)
    return result


def ks_semi_implicit_step(
    u_hat: np.ndarray,
    alpha: float | np.ndarray,
    dt: float,
    n: int,
    nonlinear: bool = True,
) -> np.ndarray:
    """Integrating-factor RK2 step in Fourier space.

    u_hat holds rfft coefficients (..., n // 2 + 1); alpha broadcasts against
    the leading axes. With E = exp(L dt):

        a   = E (u + dt N(u))
        u+  = E u + dt/2 (E N(u) + N(a))
    """
    alpha = np.asarray(alpha, dtype=float)
    factor = np.exp(linear_symbol(n, alpha) * dt)
    if not nonlinear:
        return factor * u_hat
    n_now = nonlinear_term_hat(u_hat, alpha, n)
    predictor = factor * (u_hat + dt * n_now)
    n_pred = nonlinear_term_hat(predictor, alpha, n)
    return factor * u_hat + 0.5 * dt * (factor * n_now + n_pred)


def ks_step_physical(
    u: np.ndarray,
    alpha: float | np.ndarray,
    dt: float,
    nonlinear: bool = True,
) -> np.ndarray:
    """ks_semi_implicit_step for physical values (..., n)."""
    n = u.shape[-1]
    u_hat = np.fft.rfft(u, axis=-1)
    return np.fft.irfft(ks_semi_implicit_step(u_hat, alpha, dt, n, nonlinear), n=n, axis=-1)
