from typing import Dict

import numpy as np

from obliquefv_lib.core.field import BoundaryData, DiscreteField
from obliquefv_lib.mesh.mesh import Mesh


class DofMap:
    """
    Numbering of the unknowns: cells first, by cell id, then the interior Γ-edges
    when the scheme carries edge unknowns. Dirichlet faces and ∂Γ edges are data.
    """
    def __init__(self, mesh: Mesh, with_edges: bool):
        self.n_cells = mesh.n_cells
        self.n_edges = len(mesh.edges)
        self.with_edges = with_edges
        self.edge_dofs: Dict[int, int] = {}
        if with_edges:
            self.edge_dofs = {e: self.n_cells + n for n, e in enumerate(mesh.interior_edges)}

    @property
    def size(self) -> int:
        return self.n_cells + len(self.edge_dofs)

    def cell(self, cell: int) -> int:
        return cell

    def edge(self, edge: int) -> int:
        """Dof of an interior Γ-edge, -1 for a data edge."""
        return self.edge_dofs.get(edge, -1)

    def to_field(self, values: np.ndarray, boundary: BoundaryData) -> DiscreteField:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.size,):
            raise ValueError(f"expected {self.size} values, got {values.shape}")
        edges = None
        if self.with_edges:
            edges = boundary.edges.copy()
            for edge, dof in self.edge_dofs.items():
                edges[edge] = values[dof]
        return DiscreteField(values[:self.n_cells].copy(), boundary, edges)

    def from_field(self, field: DiscreteField) -> np.ndarray:
        values = np.zeros(self.size)
        values[:self.n_cells] = field.cells
        for edge, dof in self.edge_dofs.items():
            values[dof] = field.edge_value(edge)
        return values
