from dataclasses import dataclass
from typing import Optional, TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from obliquefv_lib.mesh.mesh import Mesh


@dataclass(frozen=True)
class BoundaryData:
    """
    Known values of a discrete function.

    Attributes:
        points (np.ndarray): Values at every grid point, flat lattice order; only the
            Dirichlet and Ω-edge points are read
        edges (np.ndarray): Edge averages for every Γ-edge; only the ∂Γ edges are read
    """
    points: np.ndarray
    edges: np.ndarray

    @classmethod
    def zeros(cls, mesh: 'Mesh') -> 'BoundaryData':
        return cls(np.zeros(mesh.grid.flat_points.shape[0]), np.zeros(len(mesh.edges)))

    def __sub__(self, other: 'BoundaryData') -> 'BoundaryData':
        return BoundaryData(self.points - other.points, self.edges - other.edges)


@dataclass(frozen=True)
class DiscreteField:
    """
    Element of the discrete space: one value per cell, optionally one per Γ-edge,
    plus the boundary data it carries.

    ``edges`` covers every Γ-edge; entries of ∂Γ edges repeat ``boundary.edges``.
    Schemes without edge unknowns leave it as None.
    """
    cells: np.ndarray
    boundary: BoundaryData
    edges: Optional[np.ndarray] = None

    @property
    def has_edges(self) -> bool:
        return self.edges is not None

    def vertex_value(self, mesh: 'Mesh', vertex: int) -> float:
        v = mesh.vertices[vertex]
        total = self.cells[list(v.cells)].sum() + self.boundary.points[list(v.data)].sum()
        return float(total) / v.size

    def vertex_values(self, mesh: 'Mesh') -> np.ndarray:
        return np.array([self.vertex_value(mesh, v) for v in range(len(mesh.vertices))])

    def neighbour_value(self, mesh: 'Mesh', face: int) -> float:
        """φ_q of a non-Γ face: the neighbour cell or the Dirichlet datum at x_q."""
        f = mesh.faces[face]
        if f.neighbour >= 0:
            return float(self.cells[f.neighbour])
        return float(self.boundary.points[f.outer_point])

    def edge_value(self, edge: int) -> float:
        if self.edges is None:
            raise ValueError("field carries no edge values")
        return float(self.edges[edge])

    def __sub__(self, other: 'DiscreteField') -> 'DiscreteField':
        edges = None
        if self.edges is not None and other.edges is not None:
            edges = self.edges - other.edges
        return DiscreteField(self.cells - other.cells, self.boundary - other.boundary, edges)
