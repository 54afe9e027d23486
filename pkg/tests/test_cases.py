import logging

import numpy as np
import pytest

from obliquefv_lib.analysis.cases import (
    CASE_NAMES, Case, affine_solution, builtin_cases, case_domain, fundamental_solution, get_case,
)
from obliquefv_lib.core.errors import CaseError
from obliquefv_lib.mesh.domains import DomainId

GAMMA_POINTS = np.array([[0.2, 0.3, 0.0], [0.7, 0.9, 0.0], [0.5, 0.5, 0.0]])


def test_registry():
    assert {case.name for case in builtin_cases()} == set(CASE_NAMES)
    assert case_domain("tesseroid") == DomainId.TESSEROID
    with pytest.raises(CaseError, match="unknown case"):
        get_case("sphere")
    with pytest.raises(CaseError):
        case_domain("sphere")


def test_constant_field_splits_into_normal_and_tangential():
    case = get_case("cube-constant")
    np.testing.assert_allclose(case.normal(GAMMA_POINTS), [[0.0, 0.0, -1.0]] * 3)
    np.testing.assert_allclose(case.transversality(GAMMA_POINTS), 1.0)
    np.testing.assert_allclose(case.tangential_field(GAMMA_POINTS), [[-1.0, -1.0, 0.0]] * 3)


def test_divergent_field():
    W = get_case("cube-divergent").tangential_field(GAMMA_POINTS)
    np.testing.assert_allclose(W, np.column_stack([GAMMA_POINTS[:, :2], np.zeros(3)]))


def test_fundamental_solution():
    solution, gradient = fundamental_solution()
    x = np.array([0.5, 0.5, 0.5])
    assert solution(x) == pytest.approx(0.81923, abs=1e-5)
    step = 1e-6
    numeric = [(solution(x + step * unit) - solution(x - step * unit)) / (2 * step) for unit in np.eye(3)]
    np.testing.assert_allclose(gradient(x), numeric, rtol=1e-7)


def test_datum_is_the_oblique_derivative():
    case = get_case("cube-rotational")
    expected = np.einsum("ij,ij->i", case.gradient(GAMMA_POINTS), case.oblique(GAMMA_POINTS))
    np.testing.assert_allclose(case.g(GAMMA_POINTS) * case.transversality(GAMMA_POINTS), expected)


def test_outward_field_is_required():
    solution, gradient = fundamental_solution()
    with pytest.raises(CaseError, match="point out of"):
        Case("flat", DomainId.CUBE, lambda x: np.broadcast_to([1.0, 0.0, 0.0], np.shape(x)).copy(),
             solution, gradient)


def test_near_tangential_field_warns(caplog):
    with caplog.at_level(logging.WARNING, logger="obliquefv_lib.analysis.cases"):
        get_case("cube-tangential")
    assert "close to tangential" in caplog.text


def test_with_solution_keeps_field():
    case = get_case("cube-constant")
    affine = case.with_solution(*affine_solution(1.0, [0.0, 0.0, 2.0]), name="affine")
    assert affine.name == "affine"
    assert affine.oblique is case.oblique
    np.testing.assert_allclose(affine.g(GAMMA_POINTS), -2.0)
    np.testing.assert_allclose(affine.dirichlet(np.array([[0.0, 0.0, 1.0]])), 3.0)


@pytest.mark.parametrize("name", ["tesseroid", "perturbed-sphere"])
def test_curved_cases_are_transversal(name):
    case = get_case(name)
    points = case.domain.map(np.array([[0.1, 0.4, 0.0], [0.9, 0.2, 0.0]]))
    assert np.all(case.transversality(points) > 0.0)
