import itertools
import logging
from dataclasses import dataclass, replace
from enum import Enum, IntEnum
from typing import Dict, List, Optional, Tuple

import numpy as np

from obliquefv_lib.core.errors import MeshDegeneracyError
from obliquefv_lib.mesh.geometry import (
    batch_decompose, batch_hexahedron_volumes, batch_patch_areas, diameter, point_line_distance,
)
from obliquefv_lib.mesh.grid import PointKind, RepresentativeGrid

logger = logging.getLogger(__name__)

Index = Tuple[int, int, int]
AxisKey = Tuple[int, ...]

# hexahedron corner offsets in VTK order
CELL_CORNERS: Tuple[Index, ...] = (
    (-1, -1, -1), (1, -1, -1), (1, 1, -1), (-1, 1, -1),
    (-1, -1, 1), (1, -1, 1), (1, 1, 1), (-1, 1, 1),
)


class StencilRole(IntEnum):
    CELL = 0
    DIRICHLET = 1
    OMEGA_EDGE = 2


class VertexLocation(str, Enum):
    INTERIOR = "interior"
    GAMMA = "gamma"
    DIRICHLET = "dirichlet"


class FaceKind(str, Enum):
    INTERIOR = "interior"
    DIRICHLET = "dirichlet"
    GAMMA = "gamma"


@dataclass(frozen=True)
class Vertex:
    """
    Face vertex x* with its averaging stencil R(x*).

    ``points`` lists the grid indices averaged into the vertex, ``roles`` tags each
    of them; ``cells`` holds the cell ids of the CELL entries and ``data`` the
    flat grid indices of the remaining (known) entries.
    """
    index: int
    key: Tuple[AxisKey, AxisKey, AxisKey]
    position: np.ndarray
    points: Tuple[Index, ...]
    roles: Tuple[StencilRole, ...]
    cells: Tuple[int, ...]
    data: Tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def location(self) -> VertexLocation:
        if not self.cells:
            return VertexLocation.DIRICHLET
        if self.key[2] == (0,):
            return VertexLocation.GAMMA
        return VertexLocation.INTERIOR


@dataclass(frozen=True)
class Face:
    """
    One face of a control volume, seen from its owner p.

    Vertices are ordered ⊕, ⊞, ⊖, ⊟ so that ñ points out of p. The decomposition
    coefficients are left as NaN on Γ-faces.
    """
    index: int
    kind: FaceKind
    owner: int
    neighbour: int
    axis: int
    direction: int
    vertices: Tuple[int, int, int, int]
    offsets: Tuple[Tuple[int, int], ...]
    corners: np.ndarray
    ntilde: np.ndarray
    area: float
    x_p: np.ndarray
    x_q: Optional[np.ndarray] = None
    outer_point: int = -1
    s: Optional[np.ndarray] = None
    t_circle: Optional[np.ndarray] = None
    t_square: Optional[np.ndarray] = None
    d_pq: float = float("nan")
    d_circle: float = float("nan")
    d_square: float = float("nan")
    beta: float = float("nan")
    alpha_circle: float = float("nan")
    alpha_square: float = float("nan")
    det: float = float("nan")

    @property
    def tangent_axes(self) -> Tuple[int, int]:
        return (self.axis + 1) % 3, (self.axis + 2) % 3

    @property
    def centroid(self) -> np.ndarray:
        return self.corners.mean(axis=0)

    def label(self) -> str:
        sign = "+" if self.direction > 0 else "-"
        return f"face {self.index} ({self.kind.value}, cell {self.owner}, axis {self.axis}{sign})"


@dataclass(frozen=True)
class ControlVolume:
    index: int
    grid_index: Index
    center: np.ndarray
    vertices: Tuple[int, ...]
    volume: float
    diameter: float
    faces: Tuple[int, ...]
    gamma_face: int = -1


@dataclass(frozen=True)
class GammaEdge:
    """Straight Γ-edge between two face vertices; shared by two Γ-faces unless on ∂Γ."""
    index: int
    vertices: Tuple[int, int]
    start: np.ndarray
    end: np.ndarray
    length: float
    midpoint: np.ndarray
    faces: Tuple[int, ...]

    @property
    def interior(self) -> bool:
        return len(self.faces) == 2


@dataclass(frozen=True)
class GammaFace:
    """
    Surface data of a Γ-face: its four edges in local order (⊕⊞, ⊞⊖, ⊖⊟, ⊟⊕),
    the conormals n_{σ,e}, the distances d⊥_pe and the unit averaged normal.
    """
    face: int
    edges: Tuple[int, int, int, int]
    conormals: np.ndarray
    perpendicular: np.ndarray
    unit_normal: np.ndarray
    diameter: float


@dataclass(frozen=True)
class Mesh:
    grid: RepresentativeGrid
    cells: List[ControlVolume]
    vertices: List[Vertex]
    faces: List[Face]
    edges: List[GammaEdge]
    gamma: Dict[int, GammaFace]
    cell_ids: Dict[Index, int]
    interior_faces: Tuple[int, ...]
    dirichlet_faces: Tuple[int, ...]
    gamma_faces: Tuple[int, ...]
    face_between: Dict[Tuple[int, int], int]
    boundary_face: Dict[Tuple[int, int, int], int]
    h: float
    h_gamma: float
    vertex_positions: np.ndarray

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def interior_edges(self) -> List[int]:
        return [edge.index for edge in self.edges if edge.interior]

    @property
    def boundary_edges(self) -> List[int]:
        return [edge.index for edge in self.edges if not edge.interior]

    def cell_at(self, index: Index) -> int:
        """Cell id of a grid index, -1 if the index holds no cell."""
        return self.cell_ids.get(tuple(index), -1)

    def face_of_cells(self, a: int, b: int) -> int:
        return self.face_between.get((min(a, b), max(a, b)), -1)

    def non_gamma_faces(self) -> List[int]:
        return list(self.interior_faces) + list(self.dirichlet_faces)

    def face_sign(self, face: Face, cell: int) -> float:
        """+1 if the face is stored from the point of view of ``cell``, -1 for its neighbour."""
        return 1.0 if face.owner == cell else -1.0


def _edge_conormal(normal: np.ndarray, other_normal: Optional[np.ndarray], start: np.ndarray,
                   end: np.ndarray, x_p: np.ndarray, label: str) -> np.ndarray:
    averaged = normal if other_normal is None else 0.5 * (normal + other_normal)
    edge = end - start
    conormal = np.cross(averaged, edge)
    norm = np.linalg.norm(conormal)
    if norm < 1e-14 * max(np.linalg.norm(edge), 1.0):
        raise MeshDegeneracyError(f"{label}: conormal cross product vanishes")
    conormal = conormal / norm
    if np.dot(conormal, 0.5 * (start + end) - x_p) < 0.0:
        conormal = -conormal
    return conormal


def boundary_edge_conormal(mesh: Mesh, sigma: int, e: int) -> np.ndarray:
    """
    Unit conormal n_{σ,e}: the normalised ((N_p + N_q)/2) × e, pointing out of σ.

    N_q is the unit normal of the second Γ-face on e, or N_p on ∂Γ. The vector is
    computed from the first face of the edge; the second face receives its negation.
    """
    edge = mesh.edges[e]
    if sigma not in edge.faces:
        raise ValueError(f"edge {e} is not an edge of face {sigma}")
    first = edge.faces[0]
    other = mesh.gamma[edge.faces[1]].unit_normal if edge.interior else None
    conormal = _edge_conormal(mesh.gamma[first].unit_normal, other, edge.start, edge.end,
                              mesh.faces[first].x_p, f"edge {e}")
    return conormal if sigma == first else -conormal


class MeshBuilder:
    """
    Builds the generalized hexahedral mesh around the points of a representative grid.

    Vertices are shared through their stencil key, so neighbouring cells see
    the same vertex objects and faces are created once, by the lower cell.
    """
    def __init__(self, grid: RepresentativeGrid):
        self.grid = grid
        self.dims = grid.dims
        self.vertices: List[Vertex] = []
        self.vertex_ids: Dict[Tuple[AxisKey, AxisKey, AxisKey], int] = {}
        self.cell_ids: Dict[Index, int] = {}
        self.faces: List[Face] = []
        self.cell_faces: List[List[int]] = []
        self.face_between: Dict[Tuple[int, int], int] = {}
        self.boundary_face: Dict[Tuple[int, int, int], int] = {}

    def _axis_key(self, axis: int, n: int, offset: int) -> AxisKey:
        other = n + offset
        upper = self.dims[axis] + 1
        if other < 0:
            return (n,)
        if other == upper or (other == 0 and axis != 2):
            return (other,)
        return (min(n, other), max(n, other))

    def _role(self, index: Index) -> StencilRole:
        if self.grid.kinds[index] != PointKind.DIRICHLET:
            return StencilRole.CELL
        extremal = sum(1 for n, dim in zip(index, self.dims) if n in (0, dim + 1))
        return StencilRole.OMEGA_EDGE if extremal >= 2 else StencilRole.DIRICHLET

    def _vertex(self, index: Index, offsets: Index) -> int:
        key = tuple(self._axis_key(axis, index[axis], offsets[axis]) for axis in range(3))
        found = self.vertex_ids.get(key)
        if found is not None:
            return found

        points = tuple(itertools.product(*key))
        roles = tuple(self._role(point) for point in points)
        cells = tuple(self.cell_ids[p] for p, role in zip(points, roles) if role == StencilRole.CELL)
        data = tuple(self.grid.flat_index(*p) for p, role in zip(points, roles) if role != StencilRole.CELL)
        position = np.mean([self.grid.points[p] for p in points], axis=0)

        vertex = Vertex(len(self.vertices), key, position, points, roles, cells, data)
        self.vertices.append(vertex)
        self.vertex_ids[key] = vertex.index
        return vertex.index

    @staticmethod
    def _face_offsets(axis: int, direction: int) -> List[Index]:
        b, c = (axis + 1) % 3, (axis + 2) % 3
        pairs = [(-1, -1), (1, -1), (1, 1), (-1, 1)]
        if direction < 0:
            pairs = [(-1, -1), (-1, 1), (1, 1), (1, -1)]
        offsets = []
        for ob, oc in pairs:
            offset = [0, 0, 0]
            offset[axis], offset[b], offset[c] = direction, ob, oc
            offsets.append(tuple(offset))
        return offsets

    def _enumerate_cells(self) -> List[Index]:
        I, J, K = self.dims
        indices = list(itertools.product(range(1, I + 1), range(1, J + 1), range(0, K + 1)))
        for cell, index in enumerate(indices):
            self.cell_ids[index] = cell
            self.cell_faces.append([])
        return indices

    def _create_faces(self, indices: List[Index]) -> None:
        lower = (1, 1, 0)
        for cell, index in enumerate(indices):
            for axis in range(3):
                for direction in (-1, 1):
                    neighbour_index = list(index)
                    neighbour_index[axis] += direction
                    neighbour_index = tuple(neighbour_index)
                    inside = lower[axis] <= neighbour_index[axis] <= self.dims[axis]
                    if inside and direction < 0:
                        continue

                    offsets = self._face_offsets(axis, direction)
                    vertices = tuple(self._vertex(index, o) for o in offsets)
                    b, c = (axis + 1) % 3, (axis + 2) % 3
                    f = len(self.faces)
                    if inside:
                        neighbour = self.cell_ids[neighbour_index]
                        sided = dict(kind=FaceKind.INTERIOR, neighbour=neighbour,
                                     x_q=self.grid.points[neighbour_index])
                        self.face_between[(cell, neighbour)] = f
                        self.cell_faces[neighbour].append(f)
                    elif axis == 2 and direction < 0:
                        sided = dict(kind=FaceKind.GAMMA)
                        self.boundary_face[(cell, axis, direction)] = f
                    else:
                        sided = dict(kind=FaceKind.DIRICHLET, x_q=self.grid.points[neighbour_index],
                                     outer_point=self.grid.flat_index(*neighbour_index))
                        self.boundary_face[(cell, axis, direction)] = f

                    self.faces.append(Face(
                        index=f,
                        owner=cell,
                        neighbour=sided.pop("neighbour", -1),
                        axis=axis,
                        direction=direction,
                        vertices=vertices,
                        offsets=tuple((o[b], o[c]) for o in offsets),
                        corners=np.array([self.vertices[v].position for v in vertices]),
                        ntilde=np.zeros(3),
                        area=0.0,
                        x_p=self.grid.points[index],
                        **sided,
                    ))
                    self.cell_faces[cell].append(f)

    def _face_geometry(self) -> None:
        corners = np.array([face.corners for face in self.faces])
        ntilde = 0.5 * np.cross(corners[:, 0] - corners[:, 2], corners[:, 1] - corners[:, 3])
        areas = batch_patch_areas(corners)
        self.faces = [
            replace(face, ntilde=normal, area=float(area))
            for face, normal, area in zip(self.faces, ntilde, areas)
        ]

        solid = [face for face in self.faces if face.kind != FaceKind.GAMMA]
        x_p = np.array([face.x_p for face in solid])
        x_q = np.array([face.x_q for face in solid])
        c = np.array([face.corners for face in solid])
        step = x_q - x_p
        diag_circle = c[:, 0] - c[:, 2]
        diag_square = c[:, 1] - c[:, 3]
        d_pq = np.linalg.norm(step, axis=1)
        d_circle = np.linalg.norm(diag_circle, axis=1)
        d_square = np.linalg.norm(diag_square, axis=1)
        s = step / d_pq[:, None]
        t_circle = diag_circle / d_circle[:, None]
        t_square = diag_square / d_square[:, None]

        result, singular, flipped = batch_decompose(
            np.array([f.ntilde for f in solid]), np.array([f.area for f in solid]), s, t_circle, t_square,
        )
        if singular >= 0:
            raise MeshDegeneracyError(f"{solid[singular].label()}: degenerate basis, |det(s, t°, t□)| < 1e-12")
        if flipped >= 0:
            raise MeshDegeneracyError(f"{solid[flipped].label()}: normal and x_p→x_q point to opposite sides")
        beta, alpha_circle, alpha_square, det = result

        for n, face in enumerate(solid):
            self.faces[face.index] = replace(
                face,
                s=s[n], t_circle=t_circle[n], t_square=t_square[n],
                d_pq=float(d_pq[n]), d_circle=float(d_circle[n]), d_square=float(d_square[n]),
                beta=float(beta[n]),
                alpha_circle=float(alpha_circle[n]),
                alpha_square=float(alpha_square[n]),
                det=float(det[n]),
            )

    def _build_cells(self, indices: List[Index]) -> List[ControlVolume]:
        corner_ids = [tuple(self._vertex(index, o) for o in CELL_CORNERS) for index in indices]
        corners = np.array([[self.vertices[v].position for v in ids] for ids in corner_ids])
        volumes = batch_hexahedron_volumes(corners)
        spans = np.linalg.norm(corners[:, :, None, :] - corners[:, None, :, :], axis=-1)
        diameters = spans.max(axis=(1, 2))

        cells = []
        for cell, index in enumerate(indices):
            gamma = self.boundary_face.get((cell, 2, -1), -1)
            cells.append(ControlVolume(
                index=cell,
                grid_index=index,
                center=self.grid.points[index],
                vertices=corner_ids[cell],
                volume=float(volumes[cell]),
                diameter=float(diameters[cell]),
                faces=tuple(self.cell_faces[cell]),
                gamma_face=gamma,
            ))
        return cells

    def _build_gamma(self, gamma_faces: List[int]) -> Tuple[List[GammaEdge], Dict[int, GammaFace], float]:
        edge_ids: Dict[Tuple[int, int], int] = {}
        edge_vertices: List[Tuple[int, int]] = []
        edge_faces: List[List[int]] = []
        local: Dict[int, Tuple[int, ...]] = {}

        for f in gamma_faces:
            ids = []
            vertices = self.faces[f].vertices
            for n in range(4):
                a, b = vertices[n], vertices[(n + 1) % 4]
                key = (min(a, b), max(a, b))
                if key not in edge_ids:
                    edge_ids[key] = len(edge_vertices)
                    edge_vertices.append((a, b))
                    edge_faces.append([])
                edge_faces[edge_ids[key]].append(f)
                ids.append(edge_ids[key])
            local[f] = tuple(ids)

        edges = []
        for e, (a, b) in enumerate(edge_vertices):
            start, end = self.vertices[a].position, self.vertices[b].position
            edges.append(GammaEdge(
                index=e,
                vertices=(a, b),
                start=start,
                end=end,
                length=float(np.linalg.norm(end - start)),
                midpoint=0.5 * (start + end),
                faces=tuple(edge_faces[e]),
            ))

        unit_normals = {f: self.faces[f].ntilde / np.linalg.norm(self.faces[f].ntilde) for f in gamma_faces}
        conormal_of: Dict[Tuple[int, int], np.ndarray] = {}
        for edge in edges:
            first = edge.faces[0]
            other = unit_normals[edge.faces[1]] if edge.interior else None
            conormal = _edge_conormal(unit_normals[first], other, edge.start, edge.end,
                                      self.faces[first].x_p, f"edge {edge.index}")
            conormal_of[(first, edge.index)] = conormal
            if edge.interior:
                conormal_of[(edge.faces[1], edge.index)] = -conormal

        surface = {}
        h_gamma = 0.0
        for f in gamma_faces:
            face = self.faces[f]
            face_diameter = diameter(face.corners)
            h_gamma = max(h_gamma, face_diameter)
            surface[f] = GammaFace(
                face=f,
                edges=local[f],
                conormals=np.array([conormal_of[(f, e)] for e in local[f]]),
                perpendicular=np.array([
                    point_line_distance(face.x_p, edges[e].start, edges[e].end) for e in local[f]
                ]),
                unit_normal=unit_normals[f],
                diameter=face_diameter,
            )
        return edges, surface, h_gamma

    def build(self) -> Mesh:
        indices = self._enumerate_cells()
        self._create_faces(indices)
        cells = self._build_cells(indices)
        self._face_geometry()

        by_kind = {kind: tuple(f.index for f in self.faces if f.kind == kind) for kind in FaceKind}
        edges, surface, h_gamma = self._build_gamma(list(by_kind[FaceKind.GAMMA]))
        mesh = Mesh(
            grid=self.grid,
            cells=cells,
            vertices=self.vertices,
            faces=self.faces,
            edges=edges,
            gamma=surface,
            cell_ids=self.cell_ids,
            interior_faces=by_kind[FaceKind.INTERIOR],
            dirichlet_faces=by_kind[FaceKind.DIRICHLET],
            gamma_faces=by_kind[FaceKind.GAMMA],
            face_between=self.face_between,
            boundary_face=self.boundary_face,
            h=max(cell.diameter for cell in cells),
            h_gamma=h_gamma,
            vertex_positions=np.array([v.position for v in self.vertices]),
        )
        logger.info("built mesh %s: %d cells, %d faces, %d Γ-faces, %d Γ-edges",
                    self.dims, len(cells), len(self.faces), len(mesh.gamma_faces), len(edges))
        logger.debug("h = %.4e, h_Γ = %.4e", mesh.h, mesh.h_gamma)
        return mesh


def build_mesh(grid: RepresentativeGrid) -> Mesh:
    """Build the control volumes, faces, Γ-edges and face coefficients of a grid."""
    return MeshBuilder(grid).build()


def mesh_statistics(mesh: Mesh) -> Dict[str, float]:
    return {
        "h": mesh.h,
        "h_gamma": mesh.h_gamma,
        "cells": mesh.n_cells,
        "faces": len(mesh.faces),
        "gamma_faces": len(mesh.gamma_faces),
        "interior_gamma_edges": len(mesh.interior_edges),
        "vertices": len(mesh.vertices),
    }
