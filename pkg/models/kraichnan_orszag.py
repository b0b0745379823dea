"""
Kraichnan-Orszag three-mode system.

    dy1/dt =  y1 y3
    dy2/dt = -y2 y3
    dy3/dt = -y1^2 + y2^2      (symmetric coupling, used by the experiments)
    dy3/dt = -y1^2 + y3^2      (ko_rhs default)

The product y1*y2 is an invariant of both forms. With the symmetric coupling
the dependence on the initial data is discontinuous across the planes y1 = 0
and y2 = 0, and (y1, y2, y3) -> (y2, y1, -y3) maps solutions onto solutions.
The y3^2 form has no discontinuity in the 1D setup.
"""

import numpy as np

from models.base_model import StochasticModel
from tools.errors import InvalidArgumentError


def ko_rhs(
    y1: np.ndarray,
    y2: np.ndarray,
    y3: np.ndarray,
    symmetric: bool = False,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    coupled = y2 if symmetric else y3
    return y1 * y3, -y2 * y3, -y1 * y1 + coupled * coupled


class KraichnanOrszagModel(StochasticModel):
    """K-O system with 1, 2 or 3 uniform random initial conditions."""

    def __init__(self, dimension: int = 1, symmetric: bool = True):
        if dimension not in (1, 2, 3):
            raise InvalidArgumentError(f"K-O supports 1, 2 or 3 random dimensions, got {dimension}")
        super().__init__(name=f"ko{dimension}d", dimension=dimension)
        self.symmetric = symmetric

    @property
    def n_vars(self) -> int:
        return 3

    @property
    def parameter_ranges(self) -> list[tuple[float, float]]:
        return [(-1.0, 1.0)] * self.dimension

    @property
    def variable_names(self) -> list[str]:
        return ["y1", "y2", "y3"]

    def initial_state(self, xi: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        state = np.zeros(xi.shape[:-1] + (3, 1))
        if self.dimension == 1:
            state[..., 0, 0] = 1.0
            state[..., 1, 0] = 0.1 * xi[..., 0]
        elif self.dimension == 2:
            state[..., 0, 0] = 1.0
            state[..., 1, 0] = 0.1 * xi[..., 0]
            state[..., 2, 0] = xi[..., 1]
        else:
            state[..., :, 0] = xi
        return state

    def rhs(self, u: np.ndarray, t: float, xi: np.ndarray) -> np.ndarray:
        d1, d2, d3 = ko_rhs(u[..., 0, :], u[..., 1, :], u[..., 2, :], symmetric=self.symmetric)
        return np.stack([d1, d2, d3], axis=-2)
