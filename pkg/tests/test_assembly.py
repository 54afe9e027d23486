import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from obliquefv_lib.analysis.cases import CASE_NAMES, get_case, zero_solution
from obliquefv_lib.analysis.norms import interpolate, vh_omega
from obliquefv_lib.assembly.dofs import DofMap
from obliquefv_lib.assembly.schemes import (
    SCHEMES, CentralScheme, assemble_central, bilinear_probe, default_stabilization, get_scheme, linear_probe,
)
from obliquefv_lib.assembly.solvers import solve_dense_oracle
from obliquefv_lib.core.errors import ConfigError
from obliquefv_lib.core.field import BoundaryData
from obliquefv_lib.regularity.factors import varrho_mesh_omega

from conftest import affine_case


@pytest.mark.parametrize("scheme", SCHEMES)
def test_zero_data_gives_zero_solution(small_cube, constant_case, scheme):
    case = constant_case.with_solution(*zero_solution())
    system = get_scheme(scheme).assemble(small_cube, case)
    assert not np.any(system.rhs)
    np.testing.assert_allclose(solve_dense_oracle(system).cells, 0.0, atol=1e-14)


def test_dof_map(small_cube):
    with_edges = DofMap(small_cube, with_edges=True)
    cells_only = DofMap(small_cube, with_edges=False)
    assert cells_only.size == small_cube.n_cells
    assert with_edges.size == small_cube.n_cells + len(small_cube.interior_edges)
    assert with_edges.edge(small_cube.interior_edges[0]) == small_cube.n_cells
    assert with_edges.edge(small_cube.boundary_edges[0]) == -1

    values = np.arange(with_edges.size, dtype=float)
    boundary = BoundaryData.zeros(small_cube)
    field = with_edges.to_field(values, boundary)
    np.testing.assert_array_equal(with_edges.from_field(field), values)
    assert field.edges[small_cube.boundary_edges].sum() == 0.0
    with pytest.raises(ValueError):
        with_edges.to_field(values[:-1], boundary)


@given(seed=st.integers(min_value=0, max_value=2 ** 16))
def test_rows_match_the_variational_form(small_cube, constant_case, seed):
    rng = np.random.default_rng(seed)
    system = assemble_central(small_cube, constant_case)
    x = rng.normal(size=system.size)
    y = rng.normal(size=system.size)
    phi = system.to_field(x)
    psi = system.dofs.to_field(y, BoundaryData.zeros(small_cube))
    R = system.parameters["R"]

    expected = bilinear_probe(small_cube, constant_case, R, phi, psi) - linear_probe(small_cube, constant_case, psi)
    assert y @ system.residual(x) == pytest.approx(expected, rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("scheme", ["central", "splitting"])
@pytest.mark.parametrize("name", ["cube-constant", "cube-neumann"])
def test_affine_solutions_are_reproduced(perturbed_cube, scheme, name):
    case = affine_case(0.7, (0.4, -0.8, 1.1), name)
    system = get_scheme(scheme).assemble(perturbed_cube, case)
    exact = system.dofs.from_field(interpolate(perturbed_cube, case, with_edges=system.dofs.with_edges))
    np.testing.assert_allclose(system.residual(exact), 0.0, atol=1e-11)


def test_stabilization(small_cube, constant_case):
    assert default_stabilization(small_cube, constant_case) == pytest.approx(math.sqrt(2.0))
    assert default_stabilization(small_cube, get_case("cube-neumann")) == 1.0
    system = CentralScheme(2.5).assemble(small_cube, constant_case)
    assert system.parameters == {"R": 2.5, "h_gamma": small_cube.h_gamma}
    for R in (0.0, -1.0):
        with pytest.raises(ConfigError, match="must be positive"):
            CentralScheme(R)


def test_unknown_scheme():
    with pytest.raises(ConfigError, match="unknown scheme"):
        get_scheme("donor-cell")


def test_cell_schemes_have_no_edge_unknowns(small_cube, constant_case):
    for scheme in ("upwind", "splitting"):
        system = get_scheme(scheme).assemble(small_cube, constant_case)
        assert system.size == small_cube.n_cells
        assert system.scheme == scheme


def _random_fields(mesh, count, seed):
    rng = np.random.default_rng(seed)
    dofs = DofMap(mesh, with_edges=True)
    boundary = BoundaryData.zeros(mesh)
    return [dofs.to_field(rng.normal(size=dofs.size), boundary) for _ in range(count)]


@pytest.mark.parametrize("name", [name for name in CASE_NAMES if name.startswith("cube-")])
def test_central_form_is_coercive(perturbed_cube, name):
    case = get_case(name)
    R = default_stabilization(perturbed_cube, case)
    for phi in _random_fields(perturbed_cube, 100, seed=11):
        assert bilinear_probe(perturbed_cube, case, R, phi, phi) > 0.0


def test_coercivity_constant_without_tangential_field(perturbed_cube):
    case = get_case("cube-neumann")
    varrho = varrho_mesh_omega(perturbed_cube)
    assert varrho > 0.0
    for phi in _random_fields(perturbed_cube, 100, seed=12):
        form = bilinear_probe(perturbed_cube, case, 1.0, phi, phi)
        assert form >= 0.9 * varrho * vh_omega(perturbed_cube, phi) ** 2
