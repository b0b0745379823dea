"""
Models Package

Right-hand sides of the benchmark systems:
- StochasticModel: Abstract base class
- LinearODEModel: du/dt = -kappa u, kappa ~ U(-1, 1)
- KraichnanOrszagModel: three-mode system in 1, 2 or 3 random dimensions
- KuramotoSivashinskyModel: pseudospectral K-S with a random bifurcation parameter
- burgers: element-local inviscid Burgers operator (physical-space refinement)
"""

from .base_model import ModelSpec, StochasticModel
from .burgers import (
    BREAKING_TIME,
    boundary_values,
    burgers_element_rhs,
    initial_condition,
    local_advection_rate,
    total_variation,
)
from .kraichnan_orszag import KraichnanOrszagModel, ko_rhs
from .kuramoto_sivashinsky import KuramotoSivashinskyModel, initial_profile, ks_rhs
from .linear_ode import LinearODEModel, linear_ode_rhs

__all__ = [
    "BREAKING_TIME",
    "KraichnanOrszagModel",
    "KuramotoSivashinskyModel",
    "LinearODEModel",
    "ModelSpec",
    "StochasticModel",
    "boundary_values",
    "burgers_element_rhs",
    "initial_condition",
    "initial_profile",
    "ko_rhs",
    "ks_rhs",
    "linear_ode_rhs",
    "local_advection_rate",
    "total_variation",
]
