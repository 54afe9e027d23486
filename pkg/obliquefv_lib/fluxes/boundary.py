import logging
from typing import Callable, Optional

import numpy as np

from obliquefv_lib.core.errors import MeshDegeneracyError, SplittingBreakdownError
from obliquefv_lib.core.field import BoundaryData
from obliquefv_lib.core.stencil import LinearStencil
from obliquefv_lib.fluxes.inner import InnerFluxes
from obliquefv_lib.mesh.geometry import BilinearPatch, decompose_normal, segment_quadrature
from obliquefv_lib.mesh.mesh import Mesh

logger = logging.getLogger(__name__)

VectorField = Callable[[np.ndarray], np.ndarray]
ScalarField = Callable[[np.ndarray], np.ndarray]

SPLITTING_DET_TOLERANCE = 1e-10
DEFAULT_MAX_OBLIQUITY = 10.0


def _local_edge(mesh: Mesh, sigma: int, e: int) -> int:
    try:
        return mesh.gamma[sigma].edges.index(e)
    except (KeyError, ValueError):
        raise ValueError(f"edge {e} is not an edge of Γ-face {sigma}") from None


def advective_bracket(mesh: Mesh, sigma: int, e: int, W: VectorField) -> float:
    """[W·n]_{σ,e}: two-point Gauss rule along the edge against the constant conormal."""
    conormal = mesh.gamma[sigma].conormals[_local_edge(mesh, sigma, e)]
    edge = mesh.edges[e]
    points, weights = segment_quadrature(edge.start, edge.end)
    values = np.asarray(W(points), dtype=float) @ conormal
    return edge.length * float(weights @ values)


def surface_div_bracket(mesh: Mesh, sigma: int, W: VectorField) -> float:
    """[div_Γ W]_σ as the sum of the edge brackets of σ."""
    return sum(advective_bracket(mesh, sigma, e, W) for e in mesh.gamma[sigma].edges)


def across_edge(mesh: Mesh, sigma: int, e: int) -> int:
    """The other Γ-face on e, -1 on ∂Γ."""
    faces = mesh.edges[e].faces
    if len(faces) < 2:
        return -1
    return faces[1] if faces[0] == sigma else faces[0]


def upwind_boundary_stencil(mesh: Mesh, sigma: int, e: int, W: VectorField,
                            boundary: Optional[BoundaryData] = None) -> LinearStencil:
    """
    Upwind advective flux T_up [W·n]_{σ,e}.

    Ties take the own cell. On ∂Γ the downstream value is the edge datum.
    """
    bracket = advective_bracket(mesh, sigma, e, W)
    if bracket >= 0.0:
        return LinearStencil({mesh.faces[sigma].owner: bracket})
    tau = across_edge(mesh, sigma, e)
    if tau >= 0:
        return LinearStencil({mesh.faces[tau].owner: bracket})
    datum = 0.0 if boundary is None else float(boundary.edges[e])
    return LinearStencil(constant=bracket * datum)


def splitting_boundary_stencil(mesh: Mesh, sigma: int, V: VectorField, g: ScalarField,
                               boundary: Optional[BoundaryData] = None,
                               max_obliquity: float = DEFAULT_MAX_OBLIQUITY,
                               fluxes: Optional[InnerFluxes] = None) -> LinearStencil:
    """
    Normal flux ∫_σ ∇T·n reconstructed from the oblique datum.

    V is the normalised field n + W and g the datum with ∇T·V = g, so along
    ŝ = V(x_p)/|V(x_p)| the derivative is g/|V|. The normal is decomposed on
    (ŝ, t°, t□) and the tangential parts are taken from the vertex values.

    Raises:
        SplittingBreakdownError: if the basis is nearly singular or the tangential
            coefficients exceed ``max_obliquity`` times β
    """
    face = mesh.faces[sigma]
    fluxes = fluxes or InnerFluxes(mesh, boundary)
    direction = np.asarray(V(face.x_p[None, :]), dtype=float)[0]
    direction = direction / np.linalg.norm(direction)

    corners = face.corners
    diag_circle = corners[0] - corners[2]
    diag_square = corners[1] - corners[3]
    d_circle = float(np.linalg.norm(diag_circle))
    d_square = float(np.linalg.norm(diag_square))
    try:
        beta, alpha_circle, alpha_square, _ = decompose_normal(
            face.ntilde, face.area, direction, diag_circle / d_circle, diag_square / d_square,
            tolerance=SPLITTING_DET_TOLERANCE, label=face.label(),
        )
    except MeshDegeneracyError as error:
        raise SplittingBreakdownError(f"splitting breakdown: {error}") from None
    obliquity = float(np.hypot(alpha_circle, alpha_square) / beta)
    if obliquity > max_obliquity:
        raise SplittingBreakdownError(
            f"splitting breakdown: {face.label()} has tangential ratio {obliquity:.3f} > {max_obliquity:g}"
        )

    points, weights = BilinearPatch.quadrature(corners)
    field = np.asarray(V(points), dtype=float)
    datum = np.asarray(g(points), dtype=float) / np.linalg.norm(field, axis=-1)
    mean_datum = float(weights @ datum) / float(weights.sum())

    stencil = LinearStencil(constant=face.area * mean_datum / beta)
    plus, box_plus, minus, box_minus = face.vertices
    circle = -face.area * alpha_circle / (beta * d_circle)
    square = -face.area * alpha_square / (beta * d_square)
    stencil.merge(fluxes.vertex(plus), circle)
    stencil.merge(fluxes.vertex(minus), -circle)
    stencil.merge(fluxes.vertex(box_plus), square)
    stencil.merge(fluxes.vertex(box_minus), -square)
    return stencil
