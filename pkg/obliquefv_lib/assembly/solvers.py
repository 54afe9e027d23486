import logging
import warnings
from typing import NamedTuple, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from obliquefv_lib.assembly.schemes import LinearSystem
from obliquefv_lib.core.errors import MaxIterationsError, SingularMatrixError, SolverBreakdownError
from obliquefv_lib.core.field import DiscreteField

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
BREAKDOWN = 1e-15
DENSE_LIMIT = 5000


class ConvergenceReport(NamedTuple):
    iterations: int
    residual: float
    history: Tuple[float, ...]
    reason: str = ""


class Solution(NamedTuple):
    field: DiscreteField
    report: ConvergenceReport


def jacobi_inverse(matrix: sp.spmatrix) -> np.ndarray:
    """Inverse diagonal; zero diagonal entries are replaced by one."""
    diagonal = np.asarray(matrix.diagonal(), dtype=float).copy()
    diagonal[diagonal == 0.0] = 1.0
    return 1.0 / diagonal


def bicgstab(matrix, rhs: np.ndarray, tol: float = DEFAULT_TOL, max_iter: Optional[int] = None,
             x0: Optional[np.ndarray] = None) -> Tuple[np.ndarray, ConvergenceReport]:
    """
    Right-preconditioned BiCGStab with Jacobi scaling.

    Convergence is measured on the true residual relative to ‖b‖.

    Raises:
        SolverBreakdownError: if ρ, r̂·v or ω vanish before convergence
        MaxIterationsError: if ``max_iter`` iterations do not reach ``tol``
    """
    matrix = sp.csr_matrix(matrix)
    rhs = np.asarray(rhs, dtype=float)
    n = rhs.shape[0]
    max_iter = max_iter if max_iter is not None else 20 * n
    inverse_diagonal = jacobi_inverse(matrix)

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    r = rhs - matrix @ x
    target = tol * np.linalg.norm(rhs)
    history = [float(np.linalg.norm(r))]
    if history[0] <= target or np.linalg.norm(rhs) == 0.0:
        return x, ConvergenceReport(0, history[0], tuple(history), "initial guess")

    r_hat = r.copy()
    r_hat_norm = np.linalg.norm(r_hat)
    rho_old = alpha = omega = 1.0
    v = np.zeros(n)
    p = np.zeros(n)

    def failure(cls, reason: str, iteration: int):
        report = ConvergenceReport(iteration, history[-1], tuple(history), reason)
        return cls(f"BiCGStab {reason} after {iteration} iterations (residual {history[-1]:.3e})", report)

    for iteration in range(1, max_iter + 1):
        rho = float(r_hat @ r)
        if abs(rho) < BREAKDOWN * r_hat_norm * np.linalg.norm(r):
            raise failure(SolverBreakdownError, "rho breakdown", iteration)
        if iteration == 1:
            p = r.copy()
        else:
            p = r + (rho / rho_old) * (alpha / omega) * (p - omega * v)

        z = inverse_diagonal * p
        v = matrix @ z
        r_hat_v = float(r_hat @ v)
        if abs(r_hat_v) < BREAKDOWN * r_hat_norm * np.linalg.norm(v):
            raise failure(SolverBreakdownError, "alpha breakdown", iteration)
        alpha = rho / r_hat_v
        s = r - alpha * v

        s_norm = float(np.linalg.norm(s))
        if s_norm <= target:
            x += alpha * z
            history.append(s_norm)
            return x, ConvergenceReport(iteration, s_norm, tuple(history), "converged")

        y = inverse_diagonal * s
        t = matrix @ y
        t_dot_t = float(t @ t)
        if t_dot_t == 0.0:
            raise failure(SolverBreakdownError, "omega breakdown", iteration)
        omega = float(t @ s) / t_dot_t
        if omega == 0.0:
            raise failure(SolverBreakdownError, "omega breakdown", iteration)

        x += alpha * z + omega * y
        r = s - omega * t
        rho_old = rho
        r_norm = float(np.linalg.norm(r))
        history.append(r_norm)
        if r_norm <= target:
            return x, ConvergenceReport(iteration, r_norm, tuple(history), "converged")

    raise failure(MaxIterationsError, "iteration limit reached", max_iter)


def solve(system: LinearSystem, tol: float = DEFAULT_TOL, max_iter: Optional[int] = None) -> Solution:
    """Solve an assembled system with Jacobi-preconditioned BiCGStab."""
    values, report = bicgstab(system.matrix, system.rhs, tol=tol, max_iter=max_iter)
    logger.info("%s system solved in %d iterations (residual %.3e)", system.scheme, report.iterations,
                report.residual)
    return Solution(system.to_field(values), report)


def dense_solve(matrix, rhs: np.ndarray) -> np.ndarray:
    """Pivoted LU on a dense copy of ``matrix``."""
    dense = matrix.toarray() if sp.issparse(matrix) else np.array(matrix, dtype=float)
    if dense.shape[0] > DENSE_LIMIT:
        raise ValueError(f"dense oracle is limited to {DENSE_LIMIT} unknowns, got {dense.shape[0]}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, pivots = lu_factor(dense)
    pivot_size = np.abs(np.diag(lu))
    scale = max(float(np.abs(dense).max()), 1e-300)
    if pivot_size.min() <= np.finfo(float).eps * dense.shape[0] * scale:
        raise SingularMatrixError(f"matrix is singular (smallest pivot {pivot_size.min():.3e})")
    return lu_solve((lu, pivots), np.asarray(rhs, dtype=float))


def solve_dense_oracle(system: LinearSystem) -> DiscreteField:
    return system.to_field(dense_solve(system.matrix, system.rhs))
