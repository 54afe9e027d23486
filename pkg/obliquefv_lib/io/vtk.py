import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np

from obliquefv_lib.core.errors import ConfigError
from obliquefv_lib.core.field import DiscreteField
from obliquefv_lib.mesh.mesh import Mesh

logger = logging.getLogger(__name__)

VTK_HEXAHEDRON = 12


def _scalars(name: str, values: np.ndarray) -> str:
    body = "\n".join("%.17g" % v for v in values)
    return f"SCALARS {name} double 1\nLOOKUP_TABLE default\n{body}\n"


def export_solution(mesh: Mesh, field: DiscreteField, path: Union[str, Path],
                    error: Optional[DiscreteField] = None) -> Path:
    """
    Write the mesh and a solution as a legacy ASCII VTK unstructured grid.

    Cells carry the scalars "T" and "error" (zero when no error field is
    given); the vertices carry "T_vertex", the averages through the vertex stencils.
    """
    if not str(path).strip():
        raise ConfigError("export path is empty")
    path = Path(path)
    points = mesh.vertex_positions
    n_cells = mesh.n_cells
    errors = error.cells if error is not None else np.zeros(n_cells)

    parts = [
        "# vtk DataFile Version 3.0",
        f"obliquefv solution {mesh.grid.domain_id.value} {'x'.join(map(str, mesh.grid.dims))}",
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {len(points)} double",
    ]
    parts += ["%.17g %.17g %.17g" % tuple(p) for p in points]
    parts.append(f"CELLS {n_cells} {n_cells * 9}")
    parts += ["8 " + " ".join(str(v) for v in cell.vertices) for cell in mesh.cells]
    parts.append(f"CELL_TYPES {n_cells}")
    parts += [str(VTK_HEXAHEDRON)] * n_cells
    parts.append(f"CELL_DATA {n_cells}")
    text = "\n".join(parts) + "\n"
    text += _scalars("T", field.cells) + _scalars("error", errors)
    text += f"POINT_DATA {len(points)}\n" + _scalars("T_vertex", field.vertex_values(mesh))

    path.write_text(text, encoding="ascii")
    logger.info("wrote %s (%d cells, %d points)", path, n_cells, len(points))
    return path


def read_vtk_points(path: Union[str, Path]) -> np.ndarray:
    """Read back the POINTS block of a legacy ASCII VTK file."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    for n, line in enumerate(lines):
        if line.startswith("POINTS"):
            count = int(line.split()[1])
            block = lines[n + 1:n + 1 + count]
            return np.array([[float(x) for x in row.split()] for row in block])
    raise ValueError(f"{path} has no POINTS block")
