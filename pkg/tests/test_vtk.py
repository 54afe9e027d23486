import numpy as np
import pytest

from obliquefv_lib.analysis.norms import interpolate
from obliquefv_lib.core.errors import ConfigError
from obliquefv_lib.io.vtk import export_solution, read_vtk_points
from obliquefv_lib.mesh.grid import generate_grid
from obliquefv_lib.mesh.mesh import build_mesh


@pytest.fixture(scope="module")
def coarse_mesh():
    return build_mesh(generate_grid("cube", (2, 2, 2), 0.1, 3))


def test_export(coarse_mesh, constant_case, tmp_path):
    field = interpolate(coarse_mesh, constant_case)
    path = export_solution(coarse_mesh, field, tmp_path / "solution.vtk")
    text = path.read_text(encoding="ascii")
    assert text.startswith("# vtk DataFile Version 3.0\n")
    assert "CELLS 12 108\n" in text
    assert "CELL_TYPES 12\n" in text
    assert "SCALARS error double 1" in text
    assert f"POINT_DATA {len(coarse_mesh.vertices)}\n" in text
    np.testing.assert_allclose(read_vtk_points(path), coarse_mesh.vertex_positions, atol=1e-12)


def test_empty_path_is_rejected(coarse_mesh, constant_case):
    with pytest.raises(ConfigError):
        export_solution(coarse_mesh, interpolate(coarse_mesh, constant_case), "  ")


def test_missing_points_block(tmp_path):
    path = tmp_path / "broken.vtk"
    path.write_text("# vtk DataFile Version 3.0\n", encoding="ascii")
    with pytest.raises(ValueError, match="no POINTS"):
        read_vtk_points(path)
