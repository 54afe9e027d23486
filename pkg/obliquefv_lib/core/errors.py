from typing import Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from obliquefv_lib.assembly.solvers import ConvergenceReport


class ObliqueFVError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(ObliqueFVError, ValueError):
    """Invalid experiment configuration or command-line input."""


class GridError(ObliqueFVError, ValueError):
    """Invalid grid request (dims, perturbation amplitude, seed)."""


class CaseError(ObliqueFVError, ValueError):
    """Unknown case or an oblique field that is not transversal to Γ."""


class MeshDegeneracyError(ObliqueFVError):
    """A face, edge or conormal whose geometry cannot support the fluxes."""


class SolverError(ObliqueFVError):
    """
    Failure of a linear solve.

    Args:
        message (str): Diagnostic text
        report (ConvergenceReport, optional): Iteration record up to the failure
    """
    def __init__(self, message: str, report: Optional['ConvergenceReport'] = None):
        super().__init__(message)
        self.report = report


class SolverBreakdownError(SolverError):
    """BiCGStab hit a vanishing inner product."""


class MaxIterationsError(SolverError):
    """The iteration budget ran out before the tolerance was met."""


class SingularMatrixError(SolverError):
    """Dense elimination found a zero pivot."""


class SplittingBreakdownError(SolverError):
    """The oblique field is too close to tangential for the splitting flux."""
