import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Tuple, Union

import numpy as np

from obliquefv_lib.core.errors import GridError
from obliquefv_lib.mesh.domains import Domain, DomainId, get_domain

logger = logging.getLogger(__name__)

Dims = Tuple[int, int, int]


class PointKind(IntEnum):
    INTERIOR = 0
    GAMMA = 1
    DIRICHLET = 2


@dataclass(frozen=True)
class RepresentativeGrid:
    """
    Structured (I+2)×(J+2)×(K+2) lattice of representative points.

    Attributes:
        dims (Dims): Number of interior layers (I, J, K)
        parameters (np.ndarray): Parameter coordinates, shape (I+2, J+2, K+2, 3)
        points (np.ndarray): Physical coordinates, same shape
        kinds (np.ndarray): PointKind per lattice index
        domain (Domain): Analytic map that produced the points
        amplitude (float): Perturbation amplitude as a fraction of the spacing
        seed (int): Seed of the per-point perturbation streams
    """
    dims: Dims
    parameters: np.ndarray
    points: np.ndarray
    kinds: np.ndarray
    domain: Domain
    amplitude: float
    seed: int

    @property
    def shape(self) -> Dims:
        return tuple(n + 2 for n in self.dims)

    @property
    def spacing(self) -> np.ndarray:
        return 1.0 / (np.asarray(self.dims, dtype=float) + 1.0)

    @property
    def domain_id(self) -> DomainId:
        return self.domain.domain_id

    @property
    def flat_points(self) -> np.ndarray:
        return self.points.reshape(-1, 3)

    def kind(self, i: int, j: int, k: int) -> PointKind:
        return PointKind(int(self.kinds[i, j, k]))

    def flat_index(self, i: int, j: int, k: int) -> int:
        return int(np.ravel_multi_index((i, j, k), self.shape))


def classify(dims: Dims) -> np.ndarray:
    """Γ on the k = 0 layer, Dirichlet on every other extremal index."""
    I, J, K = dims
    kinds = np.full((I + 2, J + 2, K + 2), PointKind.INTERIOR, dtype=np.int8)
    kinds[:, :, 0] = PointKind.GAMMA
    kinds[[0, I + 1], :, :] = PointKind.DIRICHLET
    kinds[:, [0, J + 1], :] = PointKind.DIRICHLET
    kinds[:, :, K + 1] = PointKind.DIRICHLET
    return kinds


def perturbation(dims: Dims, amplitude: float, seed: int) -> np.ndarray:
    """
    Random parameter-space displacements with tangential boundary motion.

    Every lattice index draws its own PCG64 stream from
    ``SeedSequence(seed, spawn_key=(i, j, k))``, so a displacement depends only on
    the index and the seed. Components are uniform in [-a h, a h) per axis; the
    component normal to each extremal plane is zeroed.
    """
    shape = tuple(n + 2 for n in dims)
    offsets = np.empty(shape + (3,))
    for index in np.ndindex(*shape):
        stream = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=index))
        offsets[index] = stream.uniform(-1.0, 1.0, size=3)
    offsets *= amplitude / (np.asarray(dims, dtype=float) + 1.0)

    for axis, n in enumerate(dims):
        for extremal in (0, n + 1):
            selector = [slice(None)] * 3
            selector[axis] = extremal
            offsets[tuple(selector) + (axis,)] = 0.0
    return offsets


def _validate(dims, amplitude: float, seed: int) -> Dims:
    try:
        dims = tuple(int(n) for n in dims)
    except (TypeError, ValueError):
        raise GridError(f"dims must be three integers, got {dims!r}") from None
    if len(dims) != 3 or min(dims) < 2:
        raise GridError(f"dims must be three integers >= 2, got {dims!r}")
    if not 0.0 <= amplitude < 0.5:
        raise GridError(f"perturbation amplitude must lie in [0, 0.5), got {amplitude}")
    if int(seed) < 0:
        raise GridError(f"seed must be non-negative, got {seed}")
    return dims


def generate_grid(domain_id: Union[str, DomainId], dims, perturbation_amplitude: float = 0.0,
                  seed: int = 0) -> RepresentativeGrid:
    """
    Uniform parameter lattice, optionally perturbed, mapped through the domain.

    Args:
        domain_id: Cube, Tesseroid or PerturbedSphereSection
        dims: Interior layer counts (I, J, K), each >= 2
        perturbation_amplitude (float): Displacement bound as a fraction of the spacing
        seed (int): Seed of the perturbation streams

    Returns:
        RepresentativeGrid: Classified lattice of representative points
    """
    dims = _validate(dims, perturbation_amplitude, seed)
    domain = get_domain(domain_id)

    axes = [np.linspace(0.0, 1.0, n + 2) for n in dims]
    parameters = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    if perturbation_amplitude > 0.0:
        parameters = parameters + perturbation(dims, perturbation_amplitude, int(seed))

    points = domain.map(parameters)
    logger.debug("generated %s grid %s (amplitude %.3g, seed %d)",
                 domain.domain_id.value, dims, perturbation_amplitude, seed)
    return RepresentativeGrid(
        dims=dims,
        parameters=parameters,
        points=points,
        kinds=classify(dims),
        domain=domain,
        amplitude=float(perturbation_amplitude),
        seed=int(seed),
    )
