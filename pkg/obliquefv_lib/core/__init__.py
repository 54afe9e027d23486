from .config import ExperimentConfig
from .errors import (
    CaseError,
    ConfigError,
    GridError,
    MaxIterationsError,
    MeshDegeneracyError,
    ObliqueFVError,
    SingularMatrixError,
    SolverBreakdownError,
    SolverError,
    SplittingBreakdownError,
)
from .field import BoundaryData, DiscreteField
from .stencil import LinearStencil

__all__ = [
    "ExperimentConfig",
    "ObliqueFVError",
    "ConfigError",
    "GridError",
    "CaseError",
    "MeshDegeneracyError",
    "SolverError",
    "SolverBreakdownError",
    "MaxIterationsError",
    "SingularMatrixError",
    "SplittingBreakdownError",
    "BoundaryData",
    "DiscreteField",
    "LinearStencil",
]
