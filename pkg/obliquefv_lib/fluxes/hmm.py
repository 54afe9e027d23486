from dataclasses import dataclass
from typing import Tuple

import numpy as np

from obliquefv_lib.core.errors import MeshDegeneracyError
from obliquefv_lib.mesh.mesh import Mesh

MIN_PERPENDICULAR = 1e-14


@dataclass(frozen=True)
class HmmLocalOperator:
    """
    Surface diffusion fluxes of one Γ-face.

    With δ_e = φ_p − φ_e the fluxes are F = A δ and the reconstructed surface
    gradient is ∇φ = −B δ.

    Attributes:
        face (int): Γ-face id
        edges (Tuple[int, ...]): Edge ids in local order
        matrix (np.ndarray): Symmetric positive definite A, shape (4, 4)
        gradient (np.ndarray): B, shape (3, 4), columns |e| n_{σ,e} / |σ|
    """
    face: int
    edges: Tuple[int, ...]
    matrix: np.ndarray
    gradient: np.ndarray

    def fluxes(self, phi_p: float, phi_e: np.ndarray) -> np.ndarray:
        return self.matrix @ (phi_p - np.asarray(phi_e, dtype=float))

    def surface_gradient(self, phi_p: float, phi_e: np.ndarray) -> np.ndarray:
        return self.gradient @ (np.asarray(phi_e, dtype=float) - phi_p)

    def stabilization(self, mesh: Mesh, phi_p: float, phi_e: np.ndarray) -> np.ndarray:
        """S_{p,e}(φ) = φ_e − φ_p − ∇φ·(x̄_e − x_p) for every edge."""
        x_p = mesh.faces[self.face].x_p
        offsets = np.array([mesh.edges[e].midpoint - x_p for e in self.edges])
        phi_e = np.asarray(phi_e, dtype=float)
        return phi_e - phi_p - offsets @ self.surface_gradient(phi_p, phi_e)


def hmm_local_operator(mesh: Mesh, sigma: int) -> HmmLocalOperator:
    """
    Assemble A = |σ| BᵀB + Mᵀ D M with M = I − C B and D = diag(|e| / d⊥_pe).

    Rows of C are x̄_e − x_p, so M δ = −S(φ) and the fluxes satisfy
    Σ_e F_e(φ)(ψ_p − ψ_e) = |σ|∇φ·∇ψ + Σ_e (|e|/d⊥_pe) S_e(φ) S_e(ψ).
    """
    surface = mesh.gamma[sigma]
    face = mesh.faces[sigma]
    edges = [mesh.edges[e] for e in surface.edges]
    if np.any(surface.perpendicular < MIN_PERPENDICULAR):
        raise MeshDegeneracyError(f"{face.label()}: x_p lies on the line of one of its edges")

    lengths = np.array([edge.length for edge in edges])
    gradient = (surface.conormals * lengths[:, None]).T / face.area
    offsets = np.array([edge.midpoint - face.x_p for edge in edges])
    residual = np.eye(len(edges)) - offsets @ gradient
    weights = np.diag(lengths / surface.perpendicular)
    matrix = face.area * gradient.T @ gradient + residual.T @ weights @ residual
    return HmmLocalOperator(sigma, surface.edges, 0.5 * (matrix + matrix.T), gradient)
