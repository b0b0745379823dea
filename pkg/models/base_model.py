"""
Base Model - Abstract interface for all random-space benchmark systems

All models follow the same pattern:
1. Map a realization xi in [-1, 1]^d to an initial state
2. Evaluate a deterministic right-hand side at (state, t, xi)
3. Report how the state is laid out (variables x spatial dofs)

States are arrays shaped (..., n_vars, n_dofs) and realizations (..., d); every
method broadcasts over the leading axes, so one call covers all collocation
nodes of all elements.
"""

from abc import ABC, abstractmethod
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field


class ModelSpec(BaseModel):
    """Static description of a model."""
    name: str
    n_vars: int = Field(ge=1, description="State variables per spatial dof")
    n_dofs: int = Field(ge=1, description="Spatial degrees of freedom (1 for ODEs)")
    dimension: int = Field(ge=1, description="Random dimension d")
    parameter_ranges: list[tuple[float, float]] = Field(description="Physical range of each random input")
    variable_names: list[str]


class StochasticModel(ABC):
    """Abstract base class for systems driven by a uniform random vector."""

    # rk4 for ODEs; the K-S model overrides with its spectral scheme
    time_scheme: Literal["rk4", "semi-implicit-spectral"] = "rk4"

    def __init__(self, name: str, dimension: int):
        self.name = name
        self.dimension = dimension

    @property
    @abstractmethod
    def n_vars(self) -> int:
        """Number of state variables."""

    @property
    def n_dofs(self) -> int:
        return 1

    @property
    @abstractmethod
    def parameter_ranges(self) -> list[tuple[float, float]]:
        """Physical range of each random input."""

    @property
    def variable_names(self) -> list[str]:
        return [f"u{i}" for i in range(self.n_vars)] if self.n_vars > 1 else ["u"]

    @property
    def spatial_weights(self) -> np.ndarray:
        """Quadrature weights of the spatial integral (a single 1 for ODEs)."""
        return np.ones(self.n_dofs)

    @property
    def spec(self) -> ModelSpec:
        return ModelSpec(
            name=self.name,
            n_vars=self.n_vars,
            n_dofs=self.n_dofs,
            dimension=self.dimension,
            parameter_ranges=self.parameter_ranges,
            variable_names=self.variable_names,
        )

    @abstractmethod
    def initial_state(self, xi: np.ndarray) -> np.ndarray:
        """State at t=0 for realizations xi (..., d) -> (..., n_vars, n_dofs)."""

    @abstractmethod
    def rhs(self, u: np.ndarray, t: float, xi: np.ndarray) -> np.ndarray:
        """du/dt for states u (..., n_vars, n_dofs) at realizations xi (..., d)."""

    def parameters(self, xi: np.ndarray) -> np.ndarray:
        """Affine map from [-1, 1]^d to the physical parameter ranges."""
        xi = np.asarray(xi, dtype=float)
        lows = np.array([lo for lo, _ in self.parameter_ranges])
        highs = np.array([hi for _, hi in self.parameter_ranges])
        return 0.5 * (highs - lows) * xi + 0.5 * (highs + lows)

    def exact_solution(self, xi: np.ndarray, t: float) -> np.ndarray | None:
        """Closed-form state when one exists, else None."""
        return None
