"""
Sampling Module

Reference statistics by direct sampling of the random input:
- sobol_points: unscrambled Sobol sequence mapped to [-1, 1]^d (d <= 3)
- mc_points: plain pseudo-random points from a seeded generator
- mc_estimate: propagate every sample with the model's deterministic solver
  and record empirical mean/variance
"""

import logging
import warnings
from concurrent.futures import Executor

import numpy as np
from scipy.stats import qmc
from tqdm import tqdm

from config import settings
from evaluation.metrics.moments import MomentSeries, is_record_step, record_schedule
from models.base_model import StochasticModel
from propagation.stochastic import advance_nodes
from tools.errors import InvalidArgumentError, UnsupportedDimensionError

logger = logging.getLogger(__name__)

MAX_SOBOL_DIMENSION = 3


def sobol_points(d: int, n: int) -> np.ndarray:
    """
    First n points of the Sobol sequence in [-1, 1]^d.

    Args:
        d: Dimension (1 to 3)
        n: Number of points

    Returns:
        Array (n, d). The all-zero point of the sequence is skipped, so the
        first point is the domain center.
    """
    if d < 1 or d > MAX_SOBOL_DIMENSION:
        raise UnsupportedDimensionError(f"Sobol points are available for 1 <= d <= {MAX_SOBOL_DIMENSION}, got {d}")
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    engine = qmc.Sobol(d=d, scramble=False)
    engine.fast_forward(1)
    with warnings.catch_warnings():
        # balance properties need powers of two; any n is allowed here
        warnings.simplefilter("ignore", UserWarning)
        unit = engine.random(n)
    return 2.0 * unit - 1.0


def mc_points(d: int, n: int, seed: int = 0) -> np.ndarray:
    """n uniform pseudo-random points in [-1, 1]^d."""
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, size=(n, d))


def _moments(values: np.ndarray, active: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    kept = values[active]
    if kept.shape[0] == 0:
        nan = np.full(values.shape[1:], np.nan)
        return nan, nan
    return kept.mean(axis=0), kept.var(axis=0)


def mc_estimate(
    model: StochasticModel,
    points: np.ndarray,
    dt: float,
    t_final: float,
    record_interval: float,
    use_exact: bool = False,
    threshold: float | None = None,
    executor: Executor | None = None,
    workers: int = 1,
    chunk_size: int = 4096,
    progress: bool = False,
) -> tuple[MomentSeries, int]:
    """
    Empirical moments of the model driven by the given sample points.

    Args:
        model: Model to propagate
        points: Sample points (n, d) in [-1, 1]^d
        dt, t_final, record_interval: Time grid
        use_exact: Use the model's closed-form solution instead of time stepping
        threshold: Blowup threshold (default settings.BLOWUP_THRESHOLD)
        executor, workers: Optional pool spreading sample chunks
        chunk_size: Samples per propagation call
        progress: Show a progress bar

    Returns:
        (series, excluded) where excluded counts samples dropped after a
        non-finite or oversized state
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != model.dimension:
        raise InvalidArgumentError(f"points have {points.shape[1]} coordinates, model needs {model.dimension}")
    threshold = settings.BLOWUP_THRESHOLD if threshold is None else threshold
    n_steps, every = record_schedule(dt, t_final, record_interval)

    values = model.initial_state(points)
    active = np.ones(points.shape[0], dtype=bool)
    records = [(0.0, *_moments(values, active))]

    if use_exact:
        exact_check = model.exact_solution(points, 0.0)
        if exact_check is None:
            raise InvalidArgumentError(f"model '{model.name}' has no closed-form solution")

    chunks = [np.arange(start, min(start + chunk_size, points.shape[0]))
              for start in range(0, points.shape[0], chunk_size)]

    def run(chunk: np.ndarray, t: float) -> np.ndarray:
        with np.errstate(all="ignore"):
            return advance_nodes(model, values[chunk], points[chunk], t, dt, check=False)

    for step in tqdm(range(1, n_steps + 1), desc=f"{model.name} samples", disable=not progress):
        t_prev = (step - 1) * dt
        t = step * dt
        if use_exact:
            if not is_record_step(step, n_steps, every):
                continue
            values = model.exact_solution(points, t)
        elif executor is not None and workers > 1 and len(chunks) > 1:
            values = np.concatenate(list(executor.map(lambda c: run(c, t_prev), chunks)), axis=0)
        else:
            values = np.concatenate([run(c, t_prev) for c in chunks], axis=0)

        flat = np.abs(values.reshape(values.shape[0], -1))
        bad = ~np.all(np.isfinite(flat) & (flat <= threshold), axis=1)
        if np.any(bad & active):
            active &= ~bad
            values[bad] = 0.0
        if is_record_step(step, n_steps, every):
            records.append((t, *_moments(values, active)))

    excluded = int(np.count_nonzero(~active))
    if excluded:
        logger.warning("%s: %d of %d samples excluded after blowup", model.name, excluded, points.shape[0])
    return MomentSeries.from_records(records, model.variable_names), excluded
