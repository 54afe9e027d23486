import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from obliquefv_lib.analysis.cases import Case
from obliquefv_lib.core.field import BoundaryData, DiscreteField
from obliquefv_lib.mesh.geometry import segment_quadrature
from obliquefv_lib.mesh.mesh import Mesh

logger = logging.getLogger(__name__)


def _edge_averages(mesh: Mesh, function) -> np.ndarray:
    values = np.empty(len(mesh.edges))
    for edge in mesh.edges:
        points, weights = segment_quadrature(edge.start, edge.end)
        values[edge.index] = float(weights @ function(points))
    return values


def boundary_data(mesh: Mesh, case: Case) -> BoundaryData:
    """Dirichlet values at the grid points and the exact edge averages on Γ."""
    return BoundaryData(
        points=np.asarray(case.dirichlet(mesh.grid.flat_points), dtype=float),
        edges=_edge_averages(mesh, case.solution),
    )


def interpolate(mesh: Mesh, case: Case, with_edges: bool = True) -> DiscreteField:
    """I_h T̄: point values at x_p, Dirichlet values at x_q, edge averages on Γ."""
    centers = np.array([cell.center for cell in mesh.cells])
    boundary = boundary_data(mesh, case)
    return DiscreteField(
        cells=np.asarray(case.solution(centers), dtype=float),
        boundary=boundary,
        edges=boundary.edges.copy() if with_edges else None,
    )


class Seminorms(NamedTuple):
    vh_omega: float
    vh_gamma: Optional[float]
    vh: Optional[float]
    l2_omega: float
    l2_gamma: float


def vh_omega(mesh: Mesh, field: DiscreteField) -> float:
    total = 0.0
    for f in mesh.non_gamma_faces():
        face = mesh.faces[f]
        jump = field.cells[face.owner] - field.neighbour_value(mesh, f)
        total += face.area / face.d_pq * jump ** 2
    return float(np.sqrt(total))


def vh_gamma(mesh: Mesh, field: DiscreteField) -> float:
    total = 0.0
    for sigma, surface in mesh.gamma.items():
        phi_p = field.cells[mesh.faces[sigma].owner]
        for e, distance in zip(surface.edges, surface.perpendicular):
            total += mesh.edges[e].length / distance * (phi_p - field.edge_value(e)) ** 2
    return float(np.sqrt(total))


def l2_omega(mesh: Mesh, field: DiscreteField) -> float:
    volumes = np.array([cell.volume for cell in mesh.cells])
    return float(np.sqrt(volumes @ field.cells ** 2))


def l2_gamma(mesh: Mesh, field: DiscreteField) -> float:
    areas = np.array([mesh.faces[f].area for f in mesh.gamma_faces])
    owners = [mesh.faces[f].owner for f in mesh.gamma_faces]
    return float(np.sqrt(areas @ field.cells[owners] ** 2))


def seminorms(mesh: Mesh, field: DiscreteField) -> Seminorms:
    """
    Discrete norms of a field.

    V_{h,Γ} and V_h need edge values and are None for fields without them.
    """
    omega = vh_omega(mesh, field)
    gamma = vh_gamma(mesh, field) if field.has_edges else None
    combined = float(np.sqrt(omega ** 2 + mesh.h_gamma * gamma ** 2)) if gamma is not None else None
    return Seminorms(omega, gamma, combined, l2_omega(mesh, field), l2_gamma(mesh, field))


def trace_ratio(mesh: Mesh, field: DiscreteField) -> float:
    """Σ_Γ |σ| φ_p² over |φ|²_{V_h,Ω}."""
    denominator = vh_omega(mesh, field) ** 2
    if denominator == 0.0:
        return float("inf")
    return l2_gamma(mesh, field) ** 2 / denominator


@dataclass
class ErrorReport:
    """
    Errors of one solved level against the interpolated exact solution.

    ``vh`` and ``vh_gamma`` are None for schemes without edge unknowns.
    """
    scheme: str
    dims: tuple
    h: float
    h_gamma: float
    l2_omega: float
    l2_gamma: float
    vh_omega: float
    vh_gamma: Optional[float] = None
    vh: Optional[float] = None
    dofs: int = 0
    iterations: int = 0
    residual: float = 0.0
    stabilization: Optional[float] = None


def error_report(mesh: Mesh, solved: DiscreteField, case: Case, scheme: str = "central",
                 dofs: int = 0, iterations: int = 0, residual: float = 0.0,
                 stabilization: Optional[float] = None) -> ErrorReport:
    exact = interpolate(mesh, case, with_edges=solved.has_edges)
    norms = seminorms(mesh, solved - exact)
    report = ErrorReport(
        scheme=scheme,
        dims=mesh.grid.dims,
        h=mesh.h,
        h_gamma=mesh.h_gamma,
        l2_omega=norms.l2_omega,
        l2_gamma=norms.l2_gamma,
        vh_omega=norms.vh_omega,
        vh_gamma=norms.vh_gamma,
        vh=norms.vh,
        dofs=dofs,
        iterations=iterations,
        residual=residual,
        stabilization=stabilization,
    )
    logger.debug("errors at h = %.4e: L2_Ω %.4e, V_h,Ω %.4e", report.h, report.l2_omega, report.vh_omega)
    return report


def eoc(errors: Sequence[float], sizes: Sequence[float]) -> List[float]:
    """Rates ln(e₁/e₂)/ln(h₁/h₂) between consecutive levels."""
    if len(errors) != len(sizes):
        raise ValueError("errors and mesh sizes differ in length")
    rates = []
    for (e1, h1), (e2, h2) in zip(zip(errors, sizes), zip(errors[1:], sizes[1:])):
        if e1 <= 0.0 or e2 <= 0.0 or h1 == h2:
            rates.append(float("nan"))
            continue
        rates.append(float(np.log(e1 / e2) / np.log(h1 / h2)))
    return rates
