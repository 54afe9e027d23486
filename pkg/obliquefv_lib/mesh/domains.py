from abc import ABC, abstractmethod
from enum import Enum
from typing import Optional

import numpy as np
from scipy import integrate

from obliquefv_lib.core.errors import GridError

U_MIN = 3.0 * np.pi / 8.0
U_SPAN = np.pi / 4.0
V_SPAN = np.pi / 4.0
BUMP_AMPLITUDE = 0.04
BUMP_FREQUENCY = 10.0


class DomainId(str, Enum):
    CUBE = "cube"
    TESSEROID = "tesseroid"
    PERTURBED_SPHERE_SECTION = "perturbed-sphere-section"


class Domain(ABC):
    """
    Analytic map from the parameter cube [0,1]^3 onto a test domain.

    Parameter axis 2 is the layer index k; its lower face (k = 0) is Γ.
    """
    domain_id: DomainId

    @abstractmethod
    def map(self, parameters: np.ndarray) -> np.ndarray:
        """Map parameter points of shape (..., 3) to physical points of shape (..., 3)."""

    @abstractmethod
    def gamma_normal(self, points: np.ndarray) -> np.ndarray:
        """Outward unit normal of the domain on Γ, extended to points near Γ."""

    def volume(self) -> Optional[float]:
        return None

    def gamma_area(self) -> Optional[float]:
        return None


class Cube(Domain):
    """Unit cube; Γ is the bottom face z = 0."""
    domain_id = DomainId.CUBE

    def map(self, parameters: np.ndarray) -> np.ndarray:
        return np.array(parameters, dtype=float, copy=True)

    def gamma_normal(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        normal = np.zeros_like(points)
        normal[..., 2] = -1.0
        return normal

    def volume(self) -> float:
        return 1.0

    def gamma_area(self) -> float:
        return 1.0


def _spherical(radius: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    sin_u = np.sin(u)
    return np.stack([
        radius * sin_u * np.cos(v),
        radius * sin_u * np.sin(v),
        radius * np.cos(u),
    ], axis=-1)


def _angles(parameters: np.ndarray):
    parameters = np.asarray(parameters, dtype=float)
    u = U_MIN + parameters[..., 0] * U_SPAN
    v = parameters[..., 1] * V_SPAN
    r = 1.0 + parameters[..., 2]
    return u, v, r


class Tesseroid(Domain):
    """Shell section r ∈ (1,2), u ∈ (3π/8, 5π/8), v ∈ (0, π/4); Γ is the sphere r = 1."""
    domain_id = DomainId.TESSEROID

    def map(self, parameters: np.ndarray) -> np.ndarray:
        u, v, r = _angles(parameters)
        return _spherical(r, u, v)

    def gamma_normal(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return -points / np.linalg.norm(points, axis=-1, keepdims=True)

    def volume(self) -> float:
        return (8.0 - 1.0) / 3.0 * 2.0 * np.cos(U_MIN) * V_SPAN

    def gamma_area(self) -> float:
        return 2.0 * np.cos(U_MIN) * V_SPAN


class PerturbedSphereSection(Domain):
    """
    Tesseroid with a corrugated inner surface.

    The radius r ∈ (1,2) is stretched to ρ = r + 0.04 (2 − r)(sin 10u + sin 10v), so the
    outer sphere r = 2 is untouched and Γ is the bumpy surface ρ(u, v) at r = 1.
    """
    domain_id = DomainId.PERTURBED_SPHERE_SECTION

    @staticmethod
    def radius(r, u, v):
        return r + BUMP_AMPLITUDE * (2.0 - r) * (np.sin(BUMP_FREQUENCY * u) + np.sin(BUMP_FREQUENCY * v))

    def map(self, parameters: np.ndarray) -> np.ndarray:
        u, v, r = _angles(parameters)
        return _spherical(self.radius(r, u, v), u, v)

    def gamma_normal(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        norm = np.linalg.norm(points, axis=-1)
        u = np.arccos(np.clip(points[..., 2] / norm, -1.0, 1.0))
        v = np.arctan2(points[..., 1], points[..., 0])
        rho = self.radius(1.0, u, v)
        rho_u = BUMP_AMPLITUDE * BUMP_FREQUENCY * np.cos(BUMP_FREQUENCY * u)
        rho_v = BUMP_AMPLITUDE * BUMP_FREQUENCY * np.cos(BUMP_FREQUENCY * v)
        sin_u, cos_u = np.sin(u), np.cos(u)
        sin_v, cos_v = np.sin(v), np.cos(v)
        e_r = np.stack([sin_u * cos_v, sin_u * sin_v, cos_u], axis=-1)
        e_theta = np.stack([cos_u * cos_v, cos_u * sin_v, -sin_u], axis=-1)
        e_phi = np.stack([-sin_v, cos_v, np.zeros_like(v)], axis=-1)
        # x_u × x_v points away from the origin, out of the enclosed ball
        upward = ((rho ** 2 * sin_u)[..., None] * e_r
                  - (rho * rho_u * sin_u)[..., None] * e_theta
                  - (rho * rho_v)[..., None] * e_phi)
        return -upward / np.linalg.norm(upward, axis=-1, keepdims=True)

    def volume(self) -> float:
        def shell(v, u):
            inner = self.radius(1.0, u, v)
            return (8.0 - inner ** 3) / 3.0 * np.sin(u)

        value, _ = integrate.dblquad(shell, U_MIN, U_MIN + U_SPAN, 0.0, V_SPAN, epsabs=1e-13, epsrel=1e-12)
        return value


_DOMAINS = {
    DomainId.CUBE: Cube,
    DomainId.TESSEROID: Tesseroid,
    DomainId.PERTURBED_SPHERE_SECTION: PerturbedSphereSection,
}


def get_domain(domain_id) -> Domain:
    """Instantiate a domain from its id or its string name."""
    try:
        key = DomainId(domain_id)
    except ValueError:
        names = ", ".join(d.value for d in DomainId)
        raise GridError(f"unknown domain '{domain_id}' (expected one of: {names})") from None
    return _DOMAINS[key]()
