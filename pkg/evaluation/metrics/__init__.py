"""
Metrics package for evaluation.
"""

from .moments import MomentSeries, column_names, is_record_step, record_schedule
from .reference import (
    exact_ode_series,
    ode_exact_stats,
    relative_error,
    relative_error_series,
)
from .sampling import mc_estimate, mc_points, sobol_points

__all__ = [
    # Moment series
    "MomentSeries",
    "column_names",
    "is_record_step",
    "record_schedule",
    # Reference statistics and errors
    "exact_ode_series",
    "ode_exact_stats",
    "relative_error",
    "relative_error_series",
    # Sampling
    "mc_estimate",
    "mc_points",
    "sobol_points",
]
