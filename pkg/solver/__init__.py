"""
Solver Package - time loops binding propagation, refinement and moment assembly.
"""

from solver.adaptive import AdaptiveSolver, SolverResult
from solver.physical import GLOBAL_POINTS, BurgersResult, BurgersSolver, cfl_min_width

__all__ = [
    "AdaptiveSolver",
    "BurgersResult",
    "BurgersSolver",
    "GLOBAL_POINTS",
    "SolverResult",
    "cfl_min_width",
]
