import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from obliquefv_lib.mesh.geometry import point_plane_distance
from obliquefv_lib.mesh.grid import PointKind
from obliquefv_lib.mesh.mesh import Face, FaceKind, Mesh, VertexLocation

logger = logging.getLogger(__name__)

Index = Tuple[int, int, int]
Worst = Tuple[int, float]

# ζ = (ζ_X, ζ_Y) per vertex location
ZETA = {
    VertexLocation.INTERIOR: (1.0, 3.0),
    VertexLocation.GAMMA: (0.0, 4.0),
    VertexLocation.DIRICHLET: (0.0, 8.0),
}


@dataclass
class RegularityReport:
    """
    Mesh regularity factors of one mesh.

    ``worst`` maps each factor name to the face (or edge) with the largest
    contribution, or the smallest one for ``varrho``.
    """
    reg_mesh: float
    reg_mesh_omega: float
    reg_mesh_gamma: float
    varrho: float
    coefficient_bound: float
    worst: Dict[str, Worst] = field(default_factory=dict)

    def as_row(self) -> Tuple[float, float, float, float]:
        return self.reg_mesh, self.reg_mesh_omega, self.reg_mesh_gamma, self.varrho


def _argmax(values: Sequence[Tuple[int, float]]) -> Worst:
    return max(values, key=lambda item: item[1])


def _plane_distance(face: Face, point: np.ndarray) -> float:
    return point_plane_distance(point, face.centroid, face.ntilde)


def _reg_mesh_terms(mesh: Mesh) -> Tuple[float, Worst, float, Worst]:
    flatness = []
    for f in mesh.non_gamma_faces():
        face = mesh.faces[f]
        sides = [(face.owner, face.x_p)]
        if face.neighbour >= 0:
            sides.append((face.neighbour, face.x_q))
        for cell, point in sides:
            flatness.append((f, mesh.cells[cell].diameter / _plane_distance(face, point)))

    ratios = [(0, 1.0)]
    for f in mesh.interior_faces:
        face = mesh.faces[f]
        a, b = mesh.cells[face.owner].diameter, mesh.cells[face.neighbour].diameter
        ratios.append((f, max(a / b, b / a)))

    first, second = _argmax(flatness), _argmax(ratios)
    return first[1], first, second[1], second


def reg_mesh(mesh: Mesh) -> float:
    """max diam(p)/d⊥_{p,σ} over non-Γ faces plus the largest neighbour diameter ratio."""
    flatness, _, ratio, _ = _reg_mesh_terms(mesh)
    return flatness + ratio


def _stencil_spread(mesh: Mesh, face: Face) -> List[float]:
    grid_points = mesh.grid.points
    spreads = []
    for slot, v in enumerate(face.vertices):
        vertex = mesh.vertices[v]
        offsets = np.array([grid_points[p] for p in vertex.points]) - vertex.position
        diagonal = face.d_circle if slot % 2 == 0 else face.d_square
        spreads.append(float(np.sqrt((offsets ** 2).sum())) / diagonal)
    return spreads


def reg_mesh_omega(mesh: Mesh) -> float:
    """
    max |d⃗*_pq| / d◊_pq over the vertices of non-Γ faces plus max 1/|det(s, t°, t□)|.

    |d⃗*_pq| is the Euclidean norm of the distances from the stencil points to x*.
    """
    spread = max(max(_stencil_spread(mesh, mesh.faces[f])) for f in mesh.non_gamma_faces())
    skew = max(1.0 / abs(mesh.faces[f].det) for f in mesh.non_gamma_faces())
    return spread + skew


def reg_mesh_gamma(mesh: Mesh) -> float:
    """max diam(σ)/d⊥_pe over Γ-faces and their edges plus the largest diameter ratio across interior Γ-edges."""
    reach = max(float(np.max(s.diameter / s.perpendicular)) for s in mesh.gamma.values())
    ratio = 1.0
    for e in mesh.interior_edges:
        sigma, tau = mesh.edges[e].faces
        a, b = mesh.gamma[sigma].diameter, mesh.gamma[tau].diameter
        ratio = max(ratio, a / b, b / a)
    return reach + ratio


def coefficient_bound(mesh: Mesh) -> float:
    """max |(1/β, −α°/β, −α□/β)|·|det(s, t°, t□)| over non-Γ faces."""
    bound = 0.0
    for f in mesh.non_gamma_faces():
        face = mesh.faces[f]
        coefficients = np.array([1.0, -face.alpha_circle, -face.alpha_square]) / face.beta
        bound = max(bound, float(np.linalg.norm(coefficients)) * abs(face.det))
    return bound


def _grid_face(mesh: Mesh, a: Index, b: Index) -> int:
    """Face separating two adjacent lattice indices, -1 when neither holds a cell."""
    cell_a, cell_b = mesh.cell_at(a), mesh.cell_at(b)
    if cell_a >= 0 and cell_b >= 0:
        return mesh.face_of_cells(cell_a, cell_b)
    if cell_a < 0 and cell_b < 0:
        return -1
    cell, (inner, outer) = (cell_a, (a, b)) if cell_a >= 0 else (cell_b, (b, a))
    if mesh.grid.kinds[outer] != PointKind.DIRICHLET:
        return -1
    axis = next(n for n in range(3) if inner[n] != outer[n])
    return mesh.boundary_face.get((cell, axis, outer[axis] - inner[axis]), -1)


def _shift(index: Index, axis: int, step: int) -> Index:
    shifted = list(index)
    shifted[axis] += step
    return tuple(shifted)


def neighbour_sets(mesh: Mesh, face: Face, slot: int, side: int):
    """
    Lattice neighbours of cell r = ``side`` around vertex ``slot`` of an interior face.

    Returns:
        Tuple: (location, r, F*_{r,pq}, e*_{r,pq}); e* is None unless the vertex is interior
    """
    vertex = mesh.vertices[face.vertices[slot]]
    location = vertex.location
    r = mesh.cells[side].grid_index
    b, c = face.tangent_axes
    o_b, o_c = face.offsets[slot]
    stencil = set(vertex.points)

    if location == VertexLocation.DIRICHLET:
        for axis, step in ((b, o_b), (c, o_c)):
            candidate = _shift(r, axis, step)
            if 0 <= candidate[axis] < mesh.grid.kinds.shape[axis] \
                    and mesh.grid.kinds[candidate] == PointKind.DIRICHLET:
                return location, r, [candidate], None
        return location, r, [], None

    stars = [_shift(r, axis, step) for axis, step in ((b, o_b), (c, o_c))]
    stars = [f for f in stars if f in stencil]
    diagonal = None
    if location == VertexLocation.INTERIOR:
        corner = _shift(_shift(r, b, o_b), c, o_c)
        diagonal = corner if corner in stencil else None
    return location, r, stars, diagonal


def _deposit_weight(face: Face, slot: int, weight: float) -> float:
    alpha, diagonal = (face.alpha_circle, face.d_circle) if slot % 2 == 0 else (face.alpha_square, face.d_square)
    return weight * face.area * abs(alpha) / (diagonal * face.beta)


def _positive_term(face: Face, weight: float) -> float:
    epsilon = 1.0 if face.neighbour >= 0 else 0.0
    return (1.0 / face.beta
            - epsilon * abs(face.alpha_circle) * face.d_pq / (2.0 * face.beta * face.d_circle * weight)
            - epsilon * abs(face.alpha_square) * face.d_pq / (2.0 * face.beta * face.d_square * weight))


def _weights(mesh: Mesh, weights: Optional[np.ndarray]) -> np.ndarray:
    if weights is None:
        return np.ones(len(mesh.faces))
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(mesh.faces),) or np.any(weights <= 0.0):
        raise ValueError("weights must hold one positive value per face")
    return weights


def varrho_deposits(mesh: Mesh, weights: Optional[np.ndarray] = None) -> np.ndarray:
    """Cross-term sums D_ab accumulated by traversal of the interior faces."""
    weights = _weights(mesh, weights)
    deposits = np.zeros(len(mesh.faces))
    for f in mesh.interior_faces:
        face = mesh.faces[f]
        if face.alpha_circle == 0.0 and face.alpha_square == 0.0:
            continue
        for slot in range(4):
            w = _deposit_weight(face, slot, weights[f])
            if w == 0.0:
                continue
            for side in (face.owner, face.neighbour):
                location, r, stars, diagonal = neighbour_sets(mesh, face, slot, side)
                zeta_x, zeta_y = ZETA[location]
                for star in stars:
                    target = _grid_face(mesh, r, star)
                    if target >= 0:
                        deposits[target] += zeta_y * w
                    if diagonal is not None and zeta_x:
                        target = _grid_face(mesh, diagonal, star)
                        if target >= 0:
                            deposits[target] += zeta_x * w
    return deposits


def varrho_per_face(mesh: Mesh, weights: Optional[np.ndarray] = None) -> Dict[int, float]:
    weights = _weights(mesh, weights)
    deposits = varrho_deposits(mesh, weights)
    values = {}
    for f in mesh.non_gamma_faces():
        face = mesh.faces[f]
        values[f] = _positive_term(face, weights[f]) - face.d_pq / (16.0 * face.area) * deposits[f]
    return values


def varrho_mesh_omega(mesh: Mesh, weights: Optional[np.ndarray] = None) -> float:
    """
    Coercivity factor ϱ_{M,Ω}: the smallest face value of the positive term minus
    the ζ-weighted cross terms deposited on that face. May be negative.
    """
    return min(varrho_per_face(mesh, weights).values())


def _vertex_neighbours(mesh: Mesh, r: int, vertex: int, exclude: Tuple[int, ...]) -> List[int]:
    """Cells sharing a face with r and having ``vertex`` as a corner, other than ``exclude``."""
    found = []
    for f in mesh.cells[r].faces:
        face = mesh.faces[f]
        if face.kind != FaceKind.INTERIOR:
            continue
        other = face.neighbour if face.owner == r else face.owner
        if other not in exclude and vertex in mesh.cells[other].vertices:
            found.append(other)
    return found


def _dirichlet_face_at(mesh: Mesh, r: int, vertex: int, order: Tuple[int, int]) -> int:
    """First Dirichlet face of r through ``vertex``, taking the axes in ``order``; -1 if none."""
    candidates = [mesh.faces[f] for f in mesh.cells[r].faces]
    candidates = [f for f in candidates if f.kind == FaceKind.DIRICHLET and vertex in f.vertices]
    for axis in order:
        for face in candidates:
            if face.axis == axis:
                return face.index
    return -1


def triplet_sets(mesh: Mesh, face: int):
    """
    X_ab and Y_ab of a face σ_ab as explicit lists of (interior face, vertex slot, cell r, ζ).

    Works from the cell-face connectivity alone. For each interior σ_pq, vertex x* and
    r ∈ {p, q}, F*_{r,pq} holds the cells that share a face with r and the corner x*,
    other than p and q; e*_{r,pq} is the second common neighbour of the two cells of an
    interior vertex. On the Dirichlet boundary F*_{r,pq} is a Dirichlet face of r through
    x*, and the face between r and it is that face. A triplet belongs to X_ab when
    σ_ab separates e*_{r,pq} from some f ∈ F*_{r,pq}, to Y_ab when it separates r from f.
    """
    x_set, y_set = [], []
    for pq in mesh.interior_faces:
        candidate = mesh.faces[pq]
        pair = (candidate.owner, candidate.neighbour)
        for slot, v in enumerate(candidate.vertices):
            location = mesh.vertices[v].location
            zeta_x, zeta_y = ZETA[location]
            for r in pair:
                if location == VertexLocation.DIRICHLET:
                    if _dirichlet_face_at(mesh, r, v, candidate.tangent_axes) == face:
                        y_set.append((pq, slot, r, zeta_y))
                    continue

                cells = _vertex_neighbours(mesh, r, v, pair)
                if any(mesh.face_of_cells(r, f) == face for f in cells):
                    y_set.append((pq, slot, r, zeta_y))
                if location != VertexLocation.INTERIOR or len(cells) != 2:
                    continue
                common = set(_vertex_neighbours(mesh, cells[0], v, (r,)))
                common &= set(_vertex_neighbours(mesh, cells[1], v, (r,)))
                for e in common:
                    if any(mesh.face_of_cells(e, f) == face for f in cells):
                        x_set.append((pq, slot, r, zeta_x))
    return x_set, y_set


def varrho_face_from_sets(mesh: Mesh, face: int, weights: Optional[np.ndarray] = None) -> float:
    """ϱ of one non-Γ face evaluated from its triplet sets."""
    weights = _weights(mesh, weights)
    target = mesh.faces[face]
    x_set, y_set = triplet_sets(mesh, face)
    total = sum(zeta * _deposit_weight(mesh.faces[pq], slot, weights[pq]) for pq, slot, _, zeta in x_set + y_set)
    return _positive_term(target, weights[face]) - target.d_pq / (16.0 * target.area) * total


def regularity_report(mesh: Mesh, weights: Optional[np.ndarray] = None) -> RegularityReport:
    flatness, worst_flat, ratio, worst_ratio = _reg_mesh_terms(mesh)
    per_face = varrho_per_face(mesh, weights)
    worst_varrho = min(per_face.items(), key=lambda item: item[1])
    skew = _argmax([(f, 1.0 / abs(mesh.faces[f].det)) for f in mesh.non_gamma_faces()])
    reach = _argmax([(sigma, float(np.max(s.diameter / s.perpendicular))) for sigma, s in mesh.gamma.items()])

    report = RegularityReport(
        reg_mesh=flatness + ratio,
        reg_mesh_omega=reg_mesh_omega(mesh),
        reg_mesh_gamma=reg_mesh_gamma(mesh),
        varrho=worst_varrho[1],
        coefficient_bound=coefficient_bound(mesh),
        worst={
            "reg_mesh_flatness": worst_flat,
            "reg_mesh_ratio": worst_ratio,
            "reg_mesh_omega_skew": skew,
            "reg_mesh_gamma_reach": reach,
            "varrho": worst_varrho,
        },
    )
    if report.varrho <= 0.0:
        logger.warning("ϱ = %.4g is not positive (face %d); coercivity is not guaranteed",
                       report.varrho, worst_varrho[0])
    logger.debug("regularity: reg_M %.4g, reg_Ω %.4g, reg_Γ %.4g, ϱ %.4g",
                 report.reg_mesh, report.reg_mesh_omega, report.reg_mesh_gamma, report.varrho)
    return report
