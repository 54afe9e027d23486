import dataclasses
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from obliquefv_lib.core.errors import CaseError
from obliquefv_lib.mesh.domains import Domain, DomainId, get_domain

logger = logging.getLogger(__name__)

ScalarField = Callable[[np.ndarray], np.ndarray]
VectorField = Callable[[np.ndarray], np.ndarray]

SOURCE_POINT = np.array([-0.3, -0.2, -0.1])
MIN_TRANSVERSALITY = 1e-8
OBLIQUITY_WARNING = 10.0
_SAMPLES = 21


def fundamental_solution(source: Sequence[float] = tuple(SOURCE_POINT)) -> Tuple[ScalarField, VectorField]:
    """T̄(x) = 1/|x − x₀| and its gradient; harmonic away from x₀."""
    source = np.asarray(source, dtype=float)

    def solution(x):
        return 1.0 / np.linalg.norm(np.asarray(x, dtype=float) - source, axis=-1)

    def gradient(x):
        offset = np.asarray(x, dtype=float) - source
        return -offset / np.linalg.norm(offset, axis=-1, keepdims=True) ** 3

    return solution, gradient


def zero_solution() -> Tuple[ScalarField, VectorField]:
    return (lambda x: np.zeros(np.shape(x)[:-1]),
            lambda x: np.zeros(np.shape(x)))


def affine_solution(offset: float, slope: Sequence[float]) -> Tuple[ScalarField, VectorField]:
    """T(x) = a + b·x."""
    slope = np.asarray(slope, dtype=float)
    return (lambda x: offset + np.asarray(x, dtype=float) @ slope,
            lambda x: np.broadcast_to(slope, np.shape(x)).copy())


def _constant_field(vector: Sequence[float]) -> VectorField:
    vector = np.asarray(vector, dtype=float)
    return lambda x: np.broadcast_to(vector, np.shape(x)).copy()


def _towards(point: Sequence[float]) -> VectorField:
    point = np.asarray(point, dtype=float)
    return lambda x: point - np.asarray(x, dtype=float)


def _divergent(x):
    x = np.asarray(x, dtype=float)
    return np.stack([x[..., 0], x[..., 1], -np.ones(x.shape[:-1])], axis=-1)


def _rotational(x):
    x = np.asarray(x, dtype=float)
    return np.stack([-x[..., 0], x[..., 2], -np.ones(x.shape[:-1])], axis=-1)


@dataclass(frozen=True)
class Case:
    """
    Oblique derivative problem with a known solution.

    ∇T·V = g_V on Γ is normalised to ∇T·(n + W) = g with n + W = V/(V·n) and
    g = g_V/(V·n); the solution also supplies the Dirichlet data on ∂Ω∖Γ.

    Attributes:
        name (str): Case identifier
        domain_id (DomainId): Domain the case lives on
        oblique (VectorField): The field V as given
        solution (ScalarField): Exact solution T̄
        gradient (VectorField): ∇T̄
        label (str): Human-readable V
    """
    name: str
    domain_id: DomainId
    oblique: VectorField
    solution: ScalarField
    gradient: VectorField
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "domain_id", DomainId(self.domain_id))
        self._check_transversal()

    @property
    def domain(self) -> Domain:
        return get_domain(self.domain_id)

    def normal(self, x: np.ndarray) -> np.ndarray:
        return self.domain.gamma_normal(x)

    def transversality(self, x: np.ndarray) -> np.ndarray:
        """V·n."""
        return np.einsum("...i,...i->...", self.oblique(x), self.normal(x))

    def normalized_field(self, x: np.ndarray) -> np.ndarray:
        """n + W = V/(V·n)."""
        return self.oblique(x) / self.transversality(x)[..., None]

    def tangential_field(self, x: np.ndarray) -> np.ndarray:
        """W = V/(V·n) − n."""
        return self.normalized_field(x) - self.normal(x)

    def g(self, x: np.ndarray) -> np.ndarray:
        """Normalised datum ∇T̄·V/(V·n)."""
        return np.einsum("...i,...i->...", self.gradient(x), self.normalized_field(x))

    def dirichlet(self, x: np.ndarray) -> np.ndarray:
        return self.solution(x)

    def with_solution(self, solution: ScalarField, gradient: VectorField, name: Optional[str] = None) -> 'Case':
        """Same field and domain with another exact solution."""
        return dataclasses.replace(self, solution=solution, gradient=gradient, name=name or self.name)

    def _gamma_samples(self) -> np.ndarray:
        axis = np.linspace(0.0, 1.0, _SAMPLES)
        u, v = np.meshgrid(axis, axis, indexing="ij")
        parameters = np.stack([u, v, np.zeros_like(u)], axis=-1).reshape(-1, 3)
        return self.domain.map(parameters)

    def _check_transversal(self) -> None:
        points = self._gamma_samples()
        dot = self.transversality(points)
        if np.min(dot) <= MIN_TRANSVERSALITY:
            raise CaseError(f"case '{self.name}': V·n = {np.min(dot):.3e} on Γ; the field must point out of Ω")
        ratio = np.linalg.norm(self.oblique(points), axis=-1) / dot
        if np.max(ratio) > OBLIQUITY_WARNING:
            logger.warning("case '%s': V is close to tangential on Γ (|V|/(V·n) up to %.2f)",
                           self.name, np.max(ratio))


def _neumann_field(x):
    return get_domain(DomainId.CUBE).gamma_normal(x)


_TOWARDS_SECTION = (0.3, 0.2, 0.1)

# name -> (domain, V, label)
_FIELDS = {
    "cube-constant": (DomainId.CUBE, _constant_field((-1.0, -1.0, -1.0)), "V = (-1, -1, -1)"),
    "cube-divergent": (DomainId.CUBE, _divergent, "V = (x, y, -1)"),
    "cube-rotational": (DomainId.CUBE, _rotational, "V = (-x, z, -1)"),
    "cube-tangential": (DomainId.CUBE, _constant_field((11.4301, 0.0, -1.0)), "V = (11.4301, 0, -1)"),
    "cube-neumann": (DomainId.CUBE, _neumann_field, "V = n"),
    "tesseroid": (DomainId.TESSEROID, _towards(_TOWARDS_SECTION), "V = (0.3, 0.2, 0.1) - x"),
    "perturbed-sphere": (DomainId.PERTURBED_SPHERE_SECTION, _towards(_TOWARDS_SECTION), "V = (0.3, 0.2, 0.1) - x"),
}

CASE_NAMES = tuple(_FIELDS)


def get_case(name: str) -> Case:
    """Build a named case with the exact solution 1/|x − x₀|."""
    if name not in _FIELDS:
        raise CaseError(f"unknown case '{name}' (expected one of: {', '.join(CASE_NAMES)})")
    domain_id, oblique, label = _FIELDS[name]
    solution, gradient = fundamental_solution()
    return Case(name, domain_id, oblique, solution, gradient, label)


def builtin_cases() -> List[Case]:
    """The published cube, tesseroid and perturbed-section cases plus a pure Neumann case."""
    return [get_case(name) for name in CASE_NAMES]


def case_domain(name: str) -> DomainId:
    """Domain of a named case, without building it."""
    if name not in _FIELDS:
        raise CaseError(f"unknown case '{name}' (expected one of: {', '.join(CASE_NAMES)})")
    return _FIELDS[name][0]
