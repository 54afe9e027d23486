from typing import Dict, Optional

from obliquefv_lib.core.field import BoundaryData
from obliquefv_lib.core.stencil import LinearStencil
from obliquefv_lib.mesh.mesh import FaceKind, Mesh


class InnerFluxes:
    """
    Flux stencils of the faces that do not lie on Γ.

    Cell unknowns are addressed by cell id. Vertex values are expanded through
    the averaging stencils, which are cached per vertex; known values come from
    ``boundary`` and land in the stencil constant.
    """
    def __init__(self, mesh: Mesh, boundary: Optional[BoundaryData] = None):
        self.mesh = mesh
        self.boundary = boundary
        self._vertex_cache: Dict[int, LinearStencil] = {}

    def vertex(self, vertex: int) -> LinearStencil:
        cached = self._vertex_cache.get(vertex)
        if cached is not None:
            return cached
        v = self.mesh.vertices[vertex]
        weight = 1.0 / v.size
        stencil = LinearStencil({cell: weight for cell in v.cells})
        if self.boundary is not None and v.data:
            stencil.add_constant(weight * float(self.boundary.points[list(v.data)].sum()))
        self._vertex_cache[vertex] = stencil
        return stencil

    def flux(self, face: int) -> LinearStencil:
        """F_{p,σ} from the owner's side."""
        f = self.mesh.faces[face]
        if f.kind == FaceKind.GAMMA:
            raise ValueError(f"{f.label()} lies on Γ; use the boundary fluxes")

        two_point = f.area / (f.beta * f.d_pq)
        stencil = LinearStencil({f.owner: two_point})
        if f.neighbour >= 0:
            stencil.add(f.neighbour, -two_point)
        elif self.boundary is not None:
            stencil.add_constant(-two_point * float(self.boundary.points[f.outer_point]))

        plus, box_plus, minus, box_minus = f.vertices
        if f.alpha_circle != 0.0:
            circle = f.area * f.alpha_circle / (f.beta * f.d_circle)
            stencil.merge(self.vertex(plus), circle)
            stencil.merge(self.vertex(minus), -circle)
        if f.alpha_square != 0.0:
            square = f.area * f.alpha_square / (f.beta * f.d_square)
            stencil.merge(self.vertex(box_plus), square)
            stencil.merge(self.vertex(box_minus), -square)
        return stencil


def inner_flux_stencil(mesh: Mesh, face: int, side: Optional[int] = None,
                       boundary: Optional[BoundaryData] = None) -> LinearStencil:
    """
    Numerical flux through a non-Γ face.

    Args:
        mesh (Mesh): Mesh holding the face
        face (int): Face id
        side (int, optional): Cell whose outward flux is wanted; defaults to the owner p
        boundary (BoundaryData, optional): Known values; homogeneous when omitted

    Returns:
        LinearStencil: Flux over cell ids; the neighbour's stencil is the exact negation
    """
    f = mesh.faces[face]
    stencil = InnerFluxes(mesh, boundary).flux(face)
    if side is None or side == f.owner:
        return stencil
    if side == f.neighbour:
        return -stencil
    raise ValueError(f"cell {side} does not own {f.label()}")
