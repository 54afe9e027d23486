import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import scipy.sparse as sp

from obliquefv_lib.analysis.cases import Case
from obliquefv_lib.analysis.norms import boundary_data
from obliquefv_lib.assembly.dofs import DofMap
from obliquefv_lib.core.errors import ConfigError
from obliquefv_lib.core.field import BoundaryData, DiscreteField
from obliquefv_lib.core.stencil import LinearStencil
from obliquefv_lib.fluxes.boundary import (
    DEFAULT_MAX_OBLIQUITY, advective_bracket, splitting_boundary_stencil, upwind_boundary_stencil,
)
from obliquefv_lib.fluxes.hmm import hmm_local_operator
from obliquefv_lib.fluxes.inner import InnerFluxes
from obliquefv_lib.mesh.geometry import BilinearPatch, segment_quadrature
from obliquefv_lib.mesh.mesh import Mesh

logger = logging.getLogger(__name__)


@dataclass
class LinearSystem:
    """
    Assembled scheme A x = b.

    Attributes:
        matrix (sp.csr_matrix): System matrix
        rhs (np.ndarray): Right-hand side with every known value moved over
        dofs (DofMap): Numbering of the unknowns
        scheme (str): Scheme name
        mesh (Mesh): Mesh the system lives on
        boundary (BoundaryData): Data folded into the right-hand side
        parameters (Dict[str, float]): R and h_Γ for the central scheme
    """
    matrix: sp.csr_matrix
    rhs: np.ndarray
    dofs: DofMap
    scheme: str
    mesh: Mesh
    boundary: BoundaryData
    parameters: Dict[str, float] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.dofs.size

    def residual(self, values: np.ndarray) -> np.ndarray:
        return self.matrix @ values - self.rhs

    def to_field(self, values: np.ndarray) -> DiscreteField:
        return self.dofs.to_field(values, self.boundary)


def gamma_source(mesh: Mesh, case: Case, sigma: int) -> float:
    """∫_σ g by 2×2 Gauss quadrature on the bilinear patch."""
    points, weights = BilinearPatch.quadrature(mesh.faces[sigma].corners)
    return float(weights @ case.g(points))


def default_stabilization(mesh: Mesh, case: Case) -> float:
    """R = max(1, ‖W‖_∞) sampled at the Γ-edge quadrature points."""
    largest = 0.0
    for edge in mesh.edges:
        points, _ = segment_quadrature(edge.start, edge.end)
        largest = max(largest, float(np.max(np.linalg.norm(case.tangential_field(points), axis=-1))))
    return max(1.0, largest)


class Scheme(ABC):
    """
    Finite volume scheme for the oblique derivative problem.

    Every scheme shares the inner fluxes; subclasses add the Γ-face terms
    and any extra rows.
    """
    name: str = ""
    with_edges: bool = False

    def assemble(self, mesh: Mesh, case: Case, boundary: Optional[BoundaryData] = None) -> LinearSystem:
        boundary = boundary if boundary is not None else boundary_data(mesh, case)
        dofs = DofMap(mesh, self.with_edges)
        fluxes = InnerFluxes(mesh, boundary)
        rows = [LinearStencil() for _ in range(dofs.size)]
        rhs = np.zeros(dofs.size)

        for f in mesh.non_gamma_faces():
            face = mesh.faces[f]
            flux = fluxes.flux(f)
            rows[face.owner].merge(flux)
            if face.neighbour >= 0:
                rows[face.neighbour].merge(flux, -1.0)

        parameters = self._gamma_rows(mesh, case, dofs, boundary, fluxes, rows, rhs)

        system = LinearSystem(
            matrix=self._compress(rows, dofs.size),
            rhs=rhs - np.array([row.constant for row in rows]),
            dofs=dofs,
            scheme=self.name,
            mesh=mesh,
            boundary=boundary,
            parameters=parameters,
        )
        logger.info("assembled %s system: %d unknowns, %d nonzeros", self.name, dofs.size, system.matrix.nnz)
        return system

    @staticmethod
    def _compress(rows: List[LinearStencil], size: int) -> sp.csr_matrix:
        counts = [len(row) for row in rows]
        row_index = np.repeat(np.arange(size), counts)
        columns = np.empty(row_index.size, dtype=np.int64)
        values = np.empty(row_index.size)
        start = 0
        for row in rows:
            if row.terms:
                dofs, coefficients = row.arrays()
                columns[start:start + dofs.size] = dofs
                values[start:start + dofs.size] = coefficients
                start += dofs.size
        return sp.coo_matrix((values, (row_index, columns)), shape=(size, size)).tocsr()

    @abstractmethod
    def _gamma_rows(self, mesh: Mesh, case: Case, dofs: DofMap, boundary: BoundaryData,
                    fluxes: InnerFluxes, rows: List[LinearStencil], rhs: np.ndarray) -> Dict[str, float]:
        """Add the Γ-face terms to ``rows``/``rhs`` and return the scheme parameters."""


class CentralScheme(Scheme):
    """
    Centred advection with edge unknowns, stabilised by R h_Γ times the surface
    diffusion fluxes; one conservativity row per interior Γ-edge.

    Args:
        stabilization (float, optional): R; default max(1, ‖W‖_∞)
    """
    name = "central"
    with_edges = True

    def __init__(self, stabilization: Optional[float] = None):
        if stabilization is not None and not stabilization > 0.0:
            raise ConfigError(f"stabilization R must be positive, got {stabilization}")
        self.stabilization = stabilization

    def _edge_term(self, dofs: DofMap, boundary: BoundaryData, edge: int, coefficient: float,
                   row: LinearStencil) -> None:
        dof = dofs.edge(edge)
        if dof >= 0:
            row.add(dof, coefficient)
        else:
            row.add_constant(coefficient * float(boundary.edges[edge]))

    def _gamma_rows(self, mesh, case, dofs, boundary, fluxes, rows, rhs):
        R = self.stabilization if self.stabilization is not None else default_stabilization(mesh, case)
        viscosity = R * mesh.h_gamma
        W = case.tangential_field

        for sigma in mesh.gamma_faces:
            p = mesh.faces[sigma].owner
            row = rows[p]
            operator = hmm_local_operator(mesh, sigma)
            divergence = 0.0
            for local, e in enumerate(operator.edges):
                bracket = advective_bracket(mesh, sigma, e, W)
                divergence += bracket
                self._edge_term(dofs, boundary, e, bracket, row)

                # F_e = Σ_e' A[e,e'] (T_p − T_e')
                flux = LinearStencil({p: float(operator.matrix[local].sum())})
                for other, coefficient in zip(operator.edges, operator.matrix[local]):
                    self._edge_term(dofs, boundary, other, -float(coefficient), flux)
                row.merge(flux, viscosity)
                edge_dof = dofs.edge(e)
                if edge_dof >= 0:
                    rows[edge_dof].merge(flux, -viscosity)
            row.add(p, -divergence)
            rhs[p] += gamma_source(mesh, case, sigma)

        logger.debug("central scheme: R = %.4g, h_Γ = %.4e", R, mesh.h_gamma)
        return {"R": R, "h_gamma": mesh.h_gamma}


class UpwindScheme(Scheme):
    """Upwind advection on Γ; cell unknowns only, no stabilisation."""
    name = "upwind"

    def _gamma_rows(self, mesh, case, dofs, boundary, fluxes, rows, rhs):
        W = case.tangential_field
        for sigma in mesh.gamma_faces:
            p = mesh.faces[sigma].owner
            divergence = 0.0
            for e in mesh.gamma[sigma].edges:
                divergence += advective_bracket(mesh, sigma, e, W)
                rows[p].merge(upwind_boundary_stencil(mesh, sigma, e, W, boundary))
            rows[p].add(p, -divergence)
            rhs[p] += gamma_source(mesh, case, sigma)
        return {"h_gamma": mesh.h_gamma}


class SplittingScheme(Scheme):
    """Normal flux on Γ rebuilt from the oblique datum and tangential vertex differences."""
    name = "splitting"

    def __init__(self, max_obliquity: float = DEFAULT_MAX_OBLIQUITY):
        self.max_obliquity = max_obliquity

    def _gamma_rows(self, mesh, case, dofs, boundary, fluxes, rows, rhs):
        for sigma in mesh.gamma_faces:
            p = mesh.faces[sigma].owner
            normal_flux = splitting_boundary_stencil(
                mesh, sigma, case.normalized_field, case.g, boundary,
                max_obliquity=self.max_obliquity, fluxes=fluxes,
            )
            rows[p].merge(normal_flux, -1.0)
        return {"h_gamma": mesh.h_gamma}


SCHEMES = ("central", "upwind", "splitting")


def get_scheme(name: str, stabilization: Optional[float] = None,
               max_obliquity: float = DEFAULT_MAX_OBLIQUITY) -> Scheme:
    if name == "central":
        return CentralScheme(stabilization)
    if name == "upwind":
        return UpwindScheme()
    if name == "splitting":
        return SplittingScheme(max_obliquity)
    raise ConfigError(f"unknown scheme '{name}' (expected one of: {', '.join(SCHEMES)})")


def assemble_central(mesh: Mesh, case: Case, R: Optional[float] = None,
                     boundary: Optional[BoundaryData] = None) -> LinearSystem:
    return CentralScheme(R).assemble(mesh, case, boundary)


def assemble_upwind(mesh: Mesh, case: Case, boundary: Optional[BoundaryData] = None) -> LinearSystem:
    return UpwindScheme().assemble(mesh, case, boundary)


def assemble_splitting(mesh: Mesh, case: Case, boundary: Optional[BoundaryData] = None,
                       max_obliquity: float = DEFAULT_MAX_OBLIQUITY) -> LinearSystem:
    return SplittingScheme(max_obliquity).assemble(mesh, case, boundary)


def _probe_edges(field: DiscreteField, mesh: Mesh, data: bool) -> np.ndarray:
    if field.edges is not None:
        edges = field.edges.copy()
    else:
        edges = np.zeros(len(mesh.edges))
    if not data:
        edges[mesh.boundary_edges] = 0.0
    return edges


def bilinear_probe(mesh: Mesh, case: Case, R: float, phi: DiscreteField, psi: DiscreteField) -> float:
    """
    a_h(φ, ψ) of the central scheme in its face and edge gathering form.

    φ carries its boundary data; ψ is a test function, so its Dirichlet and ∂Γ
    values are taken as zero.
    """
    fluxes = InnerFluxes(mesh, phi.boundary)
    total = 0.0
    for f in mesh.non_gamma_faces():
        face = mesh.faces[f]
        psi_q = psi.cells[face.neighbour] if face.neighbour >= 0 else 0.0
        total += fluxes.flux(f).apply(phi.cells) * (psi.cells[face.owner] - psi_q)

    phi_edges = _probe_edges(phi, mesh, data=True)
    psi_edges = _probe_edges(psi, mesh, data=False)
    W = case.tangential_field
    viscosity = R * mesh.h_gamma
    for sigma in mesh.gamma_faces:
        p = mesh.faces[sigma].owner
        operator = hmm_local_operator(mesh, sigma)
        edges = list(operator.edges)
        brackets = np.array([advective_bracket(mesh, sigma, e, W) for e in edges])
        tests = psi.cells[p] - psi_edges[edges]
        total += float(brackets * phi_edges[edges] @ tests)
        total -= float(brackets.sum()) * phi.cells[p] * psi.cells[p]
        total += viscosity * float(operator.fluxes(phi.cells[p], phi_edges[edges]) @ tests)
    return float(total)


def linear_probe(mesh: Mesh, case: Case, psi: DiscreteField) -> float:
    """ℓ_h(ψ) = Σ_σ ψ_p ∫_σ g."""
    return sum(psi.cells[mesh.faces[sigma].owner] * gamma_source(mesh, case, sigma)
               for sigma in mesh.gamma_faces)
