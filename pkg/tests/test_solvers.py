import numpy as np
import pytest
import scipy.sparse as sp

from obliquefv_lib.assembly.schemes import SCHEMES, get_scheme
from obliquefv_lib.assembly.solvers import bicgstab, dense_solve, jacobi_inverse, solve, solve_dense_oracle
from obliquefv_lib.core.errors import MaxIterationsError, SingularMatrixError


def _laplacian(n, shift=0.5):
    return sp.diags([-np.ones(n - 1), (2.0 + shift) * np.ones(n), -np.ones(n - 1)], [-1, 0, 1], format="csr")


def test_identity_converges_at_once():
    x, report = bicgstab(sp.identity(5, format="csr"), np.arange(1.0, 6.0))
    np.testing.assert_allclose(x, np.arange(1.0, 6.0))
    assert report.iterations == 1
    assert report.reason == "converged"


def test_single_unknown():
    x, _ = bicgstab(np.array([[4.0]]), np.array([2.0]))
    assert x == pytest.approx([0.5])


def test_zero_rhs_returns_initial_guess():
    x, report = bicgstab(_laplacian(10), np.zeros(10))
    assert not np.any(x)
    assert report.iterations == 0
    assert report.reason == "initial guess"


def test_matches_dense_solve():
    rng = np.random.default_rng(3)
    matrix = _laplacian(50)
    rhs = rng.normal(size=50)
    x, report = bicgstab(matrix, rhs, tol=1e-12)
    np.testing.assert_allclose(x, dense_solve(matrix, rhs), atol=1e-9)
    assert report.residual <= 1e-12 * np.linalg.norm(rhs)
    assert report.history[-1] == report.residual
    assert len(report.history) == report.iterations + 1


def test_iteration_limit_carries_report():
    with pytest.raises(MaxIterationsError) as info:
        bicgstab(_laplacian(50, shift=0.0), np.ones(50), tol=1e-14, max_iter=1)
    assert info.value.report.iterations == 1
    assert info.value.report.reason == "iteration limit reached"


def test_singular_matrix():
    with pytest.raises(SingularMatrixError):
        dense_solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.ones(2))


def test_jacobi_inverse_skips_zero_diagonal():
    matrix = sp.csr_matrix(np.array([[2.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(jacobi_inverse(matrix), [0.5, 1.0])


@pytest.mark.parametrize("scheme", SCHEMES)
def test_iterative_and_dense_solutions_agree(small_cube, constant_case, scheme):
    system = get_scheme(scheme).assemble(small_cube, constant_case)
    iterative = solve(system, tol=1e-12)
    dense = solve_dense_oracle(system)
    np.testing.assert_allclose(iterative.field.cells, dense.cells, atol=1e-8)
    if system.dofs.with_edges:
        np.testing.assert_allclose(iterative.field.edges, dense.edges, atol=1e-8)
