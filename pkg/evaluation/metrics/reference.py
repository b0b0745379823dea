"""
Reference Metrics Module

- Exact mean and variance of the linear ODE du/dt = -kappa u, kappa ~ U(-1, 1)
- Maximum relative error of a moment series against a reference
- Per-time relative errors of mean and variance
"""

import logging
from typing import Literal

import numpy as np
import pandas as pd

from evaluation.metrics.moments import MomentSeries
from tools.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

SMALL_T = 1e-6
# reference values at or below this fraction of their column maximum count as zero
ZERO_REFERENCE = 1e-12


def ode_exact_stats(t: float | np.ndarray, u0: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """
    Exact statistics of u(t) = u0 exp(-kappa t).

    Args:
        t: Time(s), t >= 0
        u0: Initial value

    Returns:
        (mean, variance) with mean = u0 sinh(t)/t and
        variance = u0^2 sinh(2t)/(2t) - mean^2; series expansions below t = 1e-6
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidArgumentError("t must be >= 0")
    small = t < SMALL_T
    safe = np.where(small, 1.0, t)

    mean = np.where(small, 1.0 + t ** 2 / 6.0 + t ** 4 / 120.0, np.sinh(safe) / safe) * u0
    second = np.sinh(2.0 * safe) / (2.0 * safe) * u0 ** 2
    variance = np.where(
        small,
        u0 ** 2 * (t ** 2 / 3.0 + 4.0 * t ** 4 / 45.0),
        second - mean ** 2,
    )
    if mean.ndim == 0:
        return float(mean), float(variance)
    return mean, variance


def _aligned(series: MomentSeries, reference: MomentSeries) -> MomentSeries:
    if reference.mean.shape[1:] != series.mean.shape[1:]:
        raise InvalidArgumentError(
            f"reference layout {reference.mean.shape[1:]} does not match {series.mean.shape[1:]}"
        )
    if reference.times.shape == series.times.shape and np.allclose(reference.times, series.times, rtol=0, atol=1e-12):
        return reference
    return reference.interpolate(series.times)


def _relative(values: np.ndarray, ref: np.ndarray, label: str) -> np.ndarray:
    """|values - ref| / |ref| with (near-)zero reference entries masked as NaN."""
    scale = np.max(np.abs(ref), axis=0, keepdims=True)
    zero = np.abs(ref) <= ZERO_REFERENCE * scale
    zero |= np.abs(ref) == 0.0
    if np.any(zero):
        logger.warning("%s reference is zero at %d of %d entries; excluded", label, int(np.count_nonzero(zero)), zero.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.abs(values - ref) / np.abs(ref)
    return np.where(zero, np.nan, rel)


def relative_error(
    series: MomentSeries,
    reference: MomentSeries,
    quantity: Literal["mean", "variance"] = "variance",
) -> float:
    """
    Maximum relative error over time, variables and dofs.

    Args:
        series: Computed moments
        reference: Reference moments (linearly interpolated onto the series
            times when the grids differ)
        quantity: "variance" (default) or "mean"

    Returns:
        sup_t max_v |q - q_ref| / q_ref; reference zeros are excluded with a warning
    """
    ref = _aligned(series, reference)
    values, target = (series.variance, ref.variance) if quantity == "variance" else (series.mean, ref.mean)
    rel = _relative(values, target, quantity)
    if np.all(np.isnan(rel)):
        return float("nan")
    return float(np.nanmax(rel))


def relative_error_series(series: MomentSeries, reference: MomentSeries) -> pd.DataFrame:
    """Per-time maximum relative errors of the mean and the variance."""
    ref = _aligned(series, reference)
    n = series.times.size
    mean_rel = _relative(series.mean, ref.mean, "mean").reshape(n, -1)
    var_rel = _relative(series.variance, ref.variance, "variance").reshape(n, -1)
    return pd.DataFrame({"time": series.times, "mean_error": _row_max(mean_rel), "variance_error": _row_max(var_rel)})


def _row_max(rel: np.ndarray) -> np.ndarray:
    filled = np.where(np.isnan(rel), -np.inf, rel).max(axis=1)
    return np.where(np.isneginf(filled), np.nan, filled)


def exact_ode_series(times: np.ndarray, u0: float = 1.0) -> MomentSeries:
    """Exact moments of the linear ODE on a time grid, as a MomentSeries."""
    mean, variance = ode_exact_stats(np.asarray(times, dtype=float), u0)
    return MomentSeries(np.asarray(times, dtype=float), np.atleast_1d(mean), np.atleast_1d(variance), ["u"])
