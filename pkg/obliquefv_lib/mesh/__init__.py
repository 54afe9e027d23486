from .domains import DomainId, get_domain
from .grid import PointKind, RepresentativeGrid, generate_grid
from .mesh import FaceKind, Mesh, StencilRole, VertexLocation, build_mesh, mesh_statistics

__all__ = [
    "DomainId",
    "get_domain",
    "PointKind",
    "RepresentativeGrid",
    "generate_grid",
    "FaceKind",
    "Mesh",
    "StencilRole",
    "VertexLocation",
    "build_mesh",
    "mesh_statistics",
]
