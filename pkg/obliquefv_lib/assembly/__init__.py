from .dofs import DofMap
from .schemes import SCHEMES, LinearSystem, assemble_central, assemble_splitting, assemble_upwind, get_scheme
from .solvers import ConvergenceReport, Solution, solve, solve_dense_oracle

__all__ = [
    "DofMap",
    "SCHEMES",
    "LinearSystem",
    "get_scheme",
    "assemble_central",
    "assemble_upwind",
    "assemble_splitting",
    "ConvergenceReport",
    "Solution",
    "solve",
    "solve_dense_oracle",
]
