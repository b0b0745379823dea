"""
Moment Series Module

Time series of the global mean and variance of every state variable and
spatial dof, plus the CSV layout shared by every mode:

    time, mean_<var>[_<dof>]..., var_<var>[_<dof>]...
"""

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from tools.errors import InvalidArgumentError


def record_schedule(dt: float, t_final: float, record_interval: float) -> tuple[int, int]:
    """Number of steps and the step stride between recorded times."""
    n_steps = int(round(t_final / dt))
    every = max(1, int(round(record_interval / dt)))
    return n_steps, every


def is_record_step(step: int, n_steps: int, every: int) -> bool:
    return step % every == 0 or step == n_steps


def column_names(variable_names: list[str], n_dofs: int) -> tuple[list[str], list[str]]:
    """Mean and variance column names in (variable, dof) order."""
    if n_dofs == 1:
        keys = list(variable_names)
    else:
        keys = [f"{name}_{dof}" for name in variable_names for dof in range(n_dofs)]
    return [f"mean_{k}" for k in keys], [f"var_{k}" for k in keys]


@dataclass
class MomentSeries:
    """Mean and variance per recorded time; arrays shaped (n_times, n_vars, n_dofs)."""
    times: np.ndarray
    mean: np.ndarray
    variance: np.ndarray
    variable_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.mean = np.asarray(self.mean, dtype=float)
        self.variance = np.asarray(self.variance, dtype=float)
        if self.mean.ndim == 1:
            self.mean = self.mean[:, None, None]
        if self.variance.ndim == 1:
            self.variance = self.variance[:, None, None]
        if self.mean.shape != self.variance.shape or self.mean.shape[0] != self.times.size:
            raise InvalidArgumentError("times, mean and variance must describe the same time grid")
        if not self.variable_names:
            n_vars = self.mean.shape[1]
            self.variable_names = ["u"] if n_vars == 1 else [f"u{i}" for i in range(n_vars)]

    @classmethod
    def from_records(cls, records: list[tuple[float, np.ndarray, np.ndarray]],
                     variable_names: list[str] | None = None) -> "MomentSeries":
        """Build from (time, mean, variance) tuples in time order."""
        if not records:
            raise InvalidArgumentError("no recorded times")
        times = [r[0] for r in records]
        mean = np.stack([np.asarray(r[1], dtype=float) for r in records])
        variance = np.stack([np.asarray(r[2], dtype=float) for r in records])
        return cls(times, mean, variance, list(variable_names or []))

    @property
    def n_vars(self) -> int:
        return self.mean.shape[1]

    @property
    def n_dofs(self) -> int:
        return self.mean.shape[2]

    def interpolate(self, times: np.ndarray) -> "MomentSeries":
        """Linear interpolation onto ``times`` (inside the recorded range)."""
        times = np.asarray(times, dtype=float)
        tol = 1e-9 * max(1.0, abs(self.times[-1]))
        if times.size and (times.min() < self.times[0] - tol or times.max() > self.times[-1] + tol):
            raise InvalidArgumentError("requested times lie outside the recorded range")
        flat_mean = self.mean.reshape(self.times.size, -1)
        flat_var = self.variance.reshape(self.times.size, -1)
        mean = np.stack([np.interp(times, self.times, col) for col in flat_mean.T], axis=-1)
        variance = np.stack([np.interp(times, self.times, col) for col in flat_var.T], axis=-1)
        shape = (times.size, self.n_vars, self.n_dofs)
        return MomentSeries(times, mean.reshape(shape), variance.reshape(shape), self.variable_names)

    def to_frame(self) -> pd.DataFrame:
        """CSV layout; variances below zero are clamped to zero."""
        mean_cols, var_cols = column_names(self.variable_names, self.n_dofs)
        n = self.times.size
        frame = pd.DataFrame({"time": self.times})
        means = pd.DataFrame(self.mean.reshape(n, -1), columns=mean_cols)
        variances = pd.DataFrame(np.maximum(self.variance, 0.0).reshape(n, -1), columns=var_cols)
        return pd.concat([frame, means, variances], axis=1)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "MomentSeries":
        """Inverse of to_frame (variable names from the mean_ columns)."""
        mean_cols = [c for c in frame.columns if c.startswith("mean_")]
        var_cols = [c for c in frame.columns if c.startswith("var_")]
        if "time" not in frame.columns or not mean_cols or len(mean_cols) != len(var_cols):
            raise InvalidArgumentError("moment table needs time, mean_* and matching var_* columns")

        keys = [c[len("mean_"):] for c in mean_cols]
        names: list[str] = []
        for key in keys:
            name = key.rsplit("_", 1)[0] if key.rsplit("_", 1)[-1].isdigit() else key
            if name not in names:
                names.append(name)
        n_dofs = len(keys) // len(names)
        n = len(frame)
        mean = frame[mean_cols].to_numpy(dtype=float).reshape(n, len(names), n_dofs)
        variance = frame[var_cols].to_numpy(dtype=float).reshape(n, len(names), n_dofs)
        return cls(frame["time"].to_numpy(dtype=float), mean, variance, names)
