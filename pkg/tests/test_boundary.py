import numpy as np
import pytest

from obliquefv_lib.analysis.cases import get_case
from obliquefv_lib.analysis.norms import interpolate
from obliquefv_lib.core.errors import SplittingBreakdownError
from obliquefv_lib.core.field import BoundaryData
from obliquefv_lib.fluxes.boundary import (
    across_edge, advective_bracket, splitting_boundary_stencil, surface_div_bracket, upwind_boundary_stencil,
)
from obliquefv_lib.mesh.geometry import BilinearPatch

from conftest import affine_case


def constant(vector):
    vector = np.asarray(vector, dtype=float)
    return lambda x: np.broadcast_to(vector, np.shape(x)).copy()


def test_constant_field_bracket_is_edge_length(uniform_cube):
    W = constant((1.0, 0.0, 0.0))
    for sigma, surface in uniform_cube.gamma.items():
        for e, conormal in zip(surface.edges, surface.conormals):
            if np.allclose(conormal, [1.0, 0.0, 0.0]):
                assert advective_bracket(uniform_cube, sigma, e, W) == pytest.approx(uniform_cube.edges[e].length)


def test_constant_field_has_no_divergence(perturbed_cube):
    W = constant((0.4, -1.3, 0.0))
    for sigma in perturbed_cube.gamma_faces:
        assert surface_div_bracket(perturbed_cube, sigma, W) == pytest.approx(0.0, abs=1e-14)


def test_divergent_field(perturbed_cube):
    W = get_case("cube-divergent").tangential_field
    for sigma in perturbed_cube.gamma_faces:
        area = perturbed_cube.faces[sigma].area
        assert surface_div_bracket(perturbed_cube, sigma, W) == pytest.approx(2.0 * area, rel=1e-12)


def test_brackets_are_antisymmetric(tesseroid_mesh):
    W = get_case("tesseroid").tangential_field
    for e in tesseroid_mesh.interior_edges:
        sigma, tau = tesseroid_mesh.edges[e].faces
        assert advective_bracket(tesseroid_mesh, sigma, e, W) == -advective_bracket(tesseroid_mesh, tau, e, W)


def _edge_with_sign(mesh, W, positive, interior=True):
    for sigma, surface in mesh.gamma.items():
        for e in surface.edges:
            if mesh.edges[e].interior != interior:
                continue
            value = advective_bracket(mesh, sigma, e, W)
            if (value > 0.0) == positive and abs(value) > 1e-3:
                return sigma, e, value
    raise AssertionError("no such edge")


def test_upwind_takes_the_own_cell_downstream(uniform_cube):
    W = constant((0.3, 0.0, 0.0))
    sigma, e, value = _edge_with_sign(uniform_cube, W, positive=True)
    stencil = upwind_boundary_stencil(uniform_cube, sigma, e, W)
    assert stencil.terms == {uniform_cube.faces[sigma].owner: value}


def test_upwind_takes_the_neighbour_upstream(uniform_cube):
    W = constant((0.3, 0.0, 0.0))
    sigma, e, value = _edge_with_sign(uniform_cube, W, positive=False)
    tau = across_edge(uniform_cube, sigma, e)
    stencil = upwind_boundary_stencil(uniform_cube, sigma, e, W)
    assert stencil.terms == {uniform_cube.faces[tau].owner: value}


def test_upwind_tie_takes_the_own_cell(uniform_cube):
    sigma = uniform_cube.gamma_faces[4]
    e = uniform_cube.gamma[sigma].edges[0]
    stencil = upwind_boundary_stencil(uniform_cube, sigma, e, constant((0.0, 0.0, 0.0)))
    assert stencil.terms == {uniform_cube.faces[sigma].owner: 0.0}


def test_upwind_inflow_on_boundary_edge_uses_datum(uniform_cube):
    W = constant((0.3, 0.0, 0.0))
    sigma, e, value = _edge_with_sign(uniform_cube, W, positive=False, interior=False)
    assert across_edge(uniform_cube, sigma, e) == -1
    boundary = BoundaryData.zeros(uniform_cube)
    boundary.edges[e] = 2.0
    stencil = upwind_boundary_stencil(uniform_cube, sigma, e, W, boundary)
    assert not stencil.terms
    assert stencil.constant == pytest.approx(2.0 * value)


def test_splitting_with_normal_field(perturbed_cube):
    case = get_case("cube-neumann")
    for sigma in perturbed_cube.gamma_faces:
        face = perturbed_cube.faces[sigma]
        stencil = splitting_boundary_stencil(perturbed_cube, sigma, case.normalized_field, case.g)
        points, weights = BilinearPatch.quadrature(face.corners)
        assert stencil.constant == pytest.approx(float(weights @ case.g(points)), rel=1e-12)
        assert np.allclose(list(stencil.terms.values()), 0.0, atol=1e-13)


@pytest.mark.parametrize("name", ["cube-constant", "cube-neumann", "cube-tangential"])
def test_splitting_affine_exactness(perturbed_cube, name):
    b = np.array([0.4, -0.9, 1.3])
    case = affine_case(0.5, b, name)
    field = interpolate(perturbed_cube, case, with_edges=False)
    for sigma in perturbed_cube.gamma_faces:
        stencil = splitting_boundary_stencil(perturbed_cube, sigma, case.normalized_field, case.g,
                                             field.boundary, max_obliquity=1e3)
        expected = perturbed_cube.faces[sigma].ntilde @ b
        assert stencil.apply(field.cells) == pytest.approx(expected, abs=1e-11)


def test_near_tangential_field_breaks_down(uniform_cube):
    case = get_case("cube-tangential")
    sigma = uniform_cube.gamma_faces[4]
    with pytest.raises(SplittingBreakdownError, match="splitting breakdown"):
        splitting_boundary_stencil(uniform_cube, sigma, case.normalized_field, case.g)
    relaxed = splitting_boundary_stencil(uniform_cube, sigma, case.normalized_field, case.g, max_obliquity=20.0)
    assert len(relaxed) > 0
