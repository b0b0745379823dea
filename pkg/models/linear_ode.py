"""
Linear ODE - du/dt = -kappa u with kappa ~ U(-1, 1).

For negative kappa the solution grows exponentially, so the left end of the
random space needs the finer elements.
"""

import numpy as np

from models.base_model import StochasticModel


def linear_ode_rhs(u: np.ndarray, kappa: np.ndarray) -> np.ndarray:
    """du/dt = -kappa * u."""
    return -np.asarray(kappa) * np.asarray(u)


class LinearODEModel(StochasticModel):
    """Scalar decay/growth with a uniform random rate."""

    def __init__(self, u0: float = 1.0):
        super().__init__(name="linear-ode", dimension=1)
        self.u0 = u0

    @property
    def n_vars(self) -> int:
        return 1

    @property
    def parameter_ranges(self) -> list[tuple[float, float]]:
        return [(-1.0, 1.0)]

    def initial_state(self, xi: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return np.full(xi.shape[:-1] + (1, 1), self.u0)

    def rhs(self, u: np.ndarray, t: float, xi: np.ndarray) -> np.ndarray:
        kappa = self.parameters(xi)[..., 0]
        return linear_ode_rhs(u, kappa[..., None, None])

    def exact_solution(self, xi: np.ndarray, t: float) -> np.ndarray:
        kappa = self.parameters(xi)[..., 0]
        return (self.u0 * np.exp(-kappa * t))[..., None, None]
