import numpy as np
import pytest
from hypothesis import given, strategies as st

from obliquefv_lib.analysis.norms import (
    eoc, error_report, interpolate, l2_gamma, l2_omega, seminorms, trace_ratio, vh_gamma, vh_omega,
)
from obliquefv_lib.core.field import BoundaryData, DiscreteField


def _constant_field(mesh, value):
    boundary = BoundaryData(np.full(mesh.grid.flat_points.shape[0], value), np.full(len(mesh.edges), value))
    return DiscreteField(np.full(mesh.n_cells, value), boundary, np.full(len(mesh.edges), value))


def test_constant_field(perturbed_cube):
    norms = seminorms(perturbed_cube, _constant_field(perturbed_cube, 1.0))
    assert norms.vh_omega == pytest.approx(0.0, abs=1e-12)
    assert norms.vh_gamma == pytest.approx(0.0, abs=1e-12)
    assert norms.l2_omega == pytest.approx(1.0, rel=1e-12)
    assert norms.l2_gamma == pytest.approx(1.0, rel=1e-12)
    assert trace_ratio(perturbed_cube, _constant_field(perturbed_cube, 1.0)) == float("inf")


@given(seed=st.integers(min_value=0, max_value=2 ** 16))
def test_against_brute_force(small_cube, seed):
    rng = np.random.default_rng(seed)
    boundary = BoundaryData(np.zeros(small_cube.grid.flat_points.shape[0]), rng.normal(size=len(small_cube.edges)))
    field = DiscreteField(rng.normal(size=small_cube.n_cells), boundary, rng.normal(size=len(small_cube.edges)))

    omega = sum(face.area / face.d_pq * (field.cells[face.owner]
                                         - (field.cells[face.neighbour] if face.neighbour >= 0 else 0.0)) ** 2
                for face in small_cube.faces if face.index not in small_cube.gamma)
    gamma = 0.0
    for sigma, surface in small_cube.gamma.items():
        for n, e in enumerate(surface.edges):
            jump = field.cells[small_cube.faces[sigma].owner] - field.edges[e]
            gamma += small_cube.edges[e].length / surface.perpendicular[n] * jump ** 2
    volume = sum(cell.volume * field.cells[cell.index] ** 2 for cell in small_cube.cells)

    assert vh_omega(small_cube, field) == pytest.approx(np.sqrt(omega), rel=1e-12)
    assert vh_gamma(small_cube, field) == pytest.approx(np.sqrt(gamma), rel=1e-12)
    assert l2_omega(small_cube, field) == pytest.approx(np.sqrt(volume), rel=1e-12)
    trace = sum(small_cube.faces[s].area * field.cells[small_cube.faces[s].owner] ** 2 for s in small_cube.gamma_faces)
    assert l2_gamma(small_cube, field) == pytest.approx(np.sqrt(trace), rel=1e-12)
    combined = seminorms(small_cube, field).vh
    assert combined == pytest.approx(np.sqrt(omega + small_cube.h_gamma * gamma), rel=1e-12)


def test_cell_field_has_no_gamma_seminorm(small_cube, constant_case):
    norms = seminorms(small_cube, interpolate(small_cube, constant_case, with_edges=False))
    assert norms.vh_gamma is None and norms.vh is None


def test_interpolant_has_no_error(small_cube, constant_case):
    report = error_report(small_cube, interpolate(small_cube, constant_case), constant_case)
    assert report.l2_omega == 0.0
    assert report.vh == 0.0
    assert report.dims == small_cube.grid.dims


def test_eoc():
    assert eoc([1.0, 0.5, 0.25], [1.0, 0.5, 0.25]) == pytest.approx([1.0, 1.0])
    assert eoc([1.0, 0.25], [1.0, 0.5]) == pytest.approx([2.0])
    assert eoc([9.412e-3, 3.922e-3], [0.366, 0.1685]) == pytest.approx([1.128], abs=1e-3)
    assert np.isnan(eoc([1.0, 0.0], [1.0, 0.5])[0])
    assert eoc([1.0], [1.0]) == []
    with pytest.raises(ValueError):
        eoc([1.0, 0.5], [1.0])
