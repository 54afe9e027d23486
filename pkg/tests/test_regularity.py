import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from obliquefv_lib.mesh.grid import generate_grid
from obliquefv_lib.mesh.mesh import build_mesh
from obliquefv_lib.regularity.factors import (
    _deposit_weight, coefficient_bound, reg_mesh, reg_mesh_gamma, reg_mesh_omega, regularity_report, triplet_sets,
    varrho_deposits, varrho_face_from_sets, varrho_mesh_omega, varrho_per_face,
)


def test_uniform_cube_is_perfectly_coercive(uniform_cube):
    assert varrho_mesh_omega(uniform_cube) == pytest.approx(1.0, abs=1e-12)
    assert coefficient_bound(uniform_cube) == pytest.approx(1.0, abs=1e-12)


def test_uniform_gamma_reach(uniform_cube):
    reach = {sigma: float(np.max(s.diameter / s.perpendicular)) for sigma, s in uniform_cube.gamma.items()}
    corner, centre = uniform_cube.gamma_faces[0], uniform_cube.gamma_faces[4]
    assert reach[corner] == pytest.approx(3.0 * math.sqrt(2.0))
    assert reach[centre] == pytest.approx(2.0 * math.sqrt(2.0))
    expected = 3.0 * math.sqrt(2.0) + math.sqrt(13.0) / (2.0 * math.sqrt(2.0))
    assert reg_mesh_gamma(uniform_cube) == pytest.approx(expected)


def test_lower_bounds(perturbed_cube):
    assert reg_mesh(perturbed_cube) > 2.0
    assert reg_mesh_omega(perturbed_cube) > 1.0
    assert reg_mesh_gamma(perturbed_cube) > 2.0


def test_coefficient_bound_stays_small(perturbed_cube):
    assert coefficient_bound(perturbed_cube) <= 3.0


@settings(max_examples=5)
@given(seed=st.integers(0, 2 ** 16), amplitude=st.floats(0.05, 0.25))
def test_traversal_matches_triplet_sets(seed, amplitude):
    mesh = build_mesh(generate_grid("cube", (3, 3, 3), amplitude, seed))
    per_face = varrho_per_face(mesh)
    for f in mesh.non_gamma_faces():
        assert varrho_face_from_sets(mesh, f) == pytest.approx(per_face[f], rel=1e-10, abs=1e-12)


def test_triplet_sums_match_deposits(small_cube):
    deposits = varrho_deposits(small_cube)
    for f in small_cube.non_gamma_faces()[::20]:
        x_set, y_set = triplet_sets(small_cube, f)
        total = sum(zeta * _deposit_weight(small_cube.faces[pq], slot, 1.0) for pq, slot, _, zeta in x_set + y_set)
        assert total == pytest.approx(deposits[f], rel=1e-10, abs=1e-14)


def test_cube_edge_vertex_lands_on_a_dirichlet_face(uniform_cube):
    corner = uniform_cube.cell_at((1, 1, 1))
    face = uniform_cube.boundary_face[(corner, 0, -1)]
    x_set, y_set = triplet_sets(uniform_cube, face)
    assert x_set == []
    on_edge = [
        (pq, slot) for pq, slot, r, zeta in y_set
        if r == corner and zeta == 8.0
        and uniform_cube.vertices[uniform_cube.faces[pq].vertices[slot]].key[:2] == ((0,), (0,))
    ]
    assert on_edge


def test_interior_vertex_sets(uniform_cube):
    centre = uniform_cube.cell_at((2, 2, 2))
    above = uniform_cube.cell_at((2, 2, 3))
    face = uniform_cube.face_of_cells(centre, above)
    x_set, y_set = triplet_sets(uniform_cube, face)
    assert {zeta for *_, zeta in x_set} == {1.0}
    assert {zeta for *_, zeta in y_set} <= {3.0, 4.0}
    assert len(x_set) > 0 and len(y_set) > 0


@pytest.mark.parametrize("dims", [(5, 5, 5), (9, 9, 9), (13, 13, 13)])
def test_regularity_factors_stay_in_band(dims):
    mesh = build_mesh(generate_grid("cube", dims, 0.15, 42))
    assert 6.0 <= reg_mesh(mesh) <= 10.0
    assert 2.5 <= reg_mesh_omega(mesh) <= 4.5
    assert 4.0 <= reg_mesh_gamma(mesh) <= 8.0


def test_varrho_is_positive_and_shrinks_under_refinement():
    values = [varrho_mesh_omega(build_mesh(generate_grid("cube", dims, 0.15, 42)))
              for dims in ((5, 5, 5), (9, 9, 9), (13, 13, 13))]
    assert all(value > 0.0 for value in values)
    assert values[0] > values[1] > values[2]


def test_unit_weights_are_the_default(small_cube):
    weights = np.ones(len(small_cube.faces))
    assert varrho_mesh_omega(small_cube, weights) == varrho_mesh_omega(small_cube)


def test_invalid_weights(small_cube):
    with pytest.raises(ValueError, match="one positive value per face"):
        varrho_mesh_omega(small_cube, np.ones(3))
    with pytest.raises(ValueError):
        varrho_mesh_omega(small_cube, -np.ones(len(small_cube.faces)))


def test_report(perturbed_cube):
    report = regularity_report(perturbed_cube)
    assert report.varrho == pytest.approx(varrho_mesh_omega(perturbed_cube))
    assert report.reg_mesh == pytest.approx(reg_mesh(perturbed_cube))
    assert report.as_row() == (report.reg_mesh, report.reg_mesh_omega, report.reg_mesh_gamma, report.varrho)
    assert set(report.worst) == {"reg_mesh_flatness", "reg_mesh_ratio", "reg_mesh_omega_skew",
                                 "reg_mesh_gamma_reach", "varrho"}
    face, value = report.worst["varrho"]
    assert value == report.varrho
    assert face in perturbed_cube.non_gamma_faces()
