from typing import Tuple

import numpy as np
from scipy.spatial.distance import pdist

from obliquefv_lib.core.errors import MeshDegeneracyError

_GAUSS_OFFSET = 0.5 / np.sqrt(3.0)
GAUSS_NODES = np.array([0.5 - _GAUSS_OFFSET, 0.5 + _GAUSS_OFFSET])
GAUSS_WEIGHTS = np.array([0.5, 0.5])


def segment_quadrature(start: np.ndarray, end: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Two-point Gauss rule on a straight segment; weights sum to one."""
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    points = start[None, :] + GAUSS_NODES[:, None] * (end - start)[None, :]
    return points, GAUSS_WEIGHTS.copy()


class BilinearPatch:
    """
    Bilinear interpolation of four face vertices.

    Corners are given in the face order ⊕, ⊞, ⊖, ⊟ and sit at the reference
    points (0,0), (1,0), (1,1), (0,1).
    """
    @staticmethod
    def evaluate(corners: np.ndarray, xi, eta) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)[..., None]
        eta = np.asarray(eta, dtype=float)[..., None]
        c0, c1, c2, c3 = corners
        return ((1 - xi) * (1 - eta) * c0 + xi * (1 - eta) * c1
                + xi * eta * c2 + (1 - xi) * eta * c3)

    @staticmethod
    def tangents(corners: np.ndarray, xi, eta) -> Tuple[np.ndarray, np.ndarray]:
        xi = np.asarray(xi, dtype=float)[..., None]
        eta = np.asarray(eta, dtype=float)[..., None]
        c0, c1, c2, c3 = corners
        d_xi = (1 - eta) * (c1 - c0) + eta * (c2 - c3)
        d_eta = (1 - xi) * (c3 - c0) + xi * (c2 - c1)
        return d_xi, d_eta

    @staticmethod
    def quadrature(corners: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Tensor 2×2 Gauss rule on the patch.

        Returns:
            Tuple[np.ndarray, np.ndarray]: Points (4, 3) and area weights (4,)
        """
        xi, eta = np.meshgrid(GAUSS_NODES, GAUSS_NODES, indexing="ij")
        xi, eta = xi.ravel(), eta.ravel()
        d_xi, d_eta = BilinearPatch.tangents(corners, xi, eta)
        jacobian = np.linalg.norm(np.cross(d_xi, d_eta), axis=-1)
        weights = np.outer(GAUSS_WEIGHTS, GAUSS_WEIGHTS).ravel() * jacobian
        return BilinearPatch.evaluate(corners, xi, eta), weights

    @staticmethod
    def area(corners: np.ndarray) -> float:
        return float(BilinearPatch.quadrature(corners)[1].sum())

    @staticmethod
    def averaged_normal(corners: np.ndarray) -> np.ndarray:
        """Half cross product of the diagonals, the exact integral of the patch normal."""
        return 0.5 * np.cross(corners[0] - corners[2], corners[1] - corners[3])


def batch_patch_areas(corners: np.ndarray) -> np.ndarray:
    """Areas of many patches, corners of shape (F, 4, 3)."""
    xi, eta = np.meshgrid(GAUSS_NODES, GAUSS_NODES, indexing="ij")
    xi, eta = xi.ravel()[None, :, None], eta.ravel()[None, :, None]
    c0, c1, c2, c3 = (corners[:, n, None, :] for n in range(4))
    d_xi = (1 - eta) * (c1 - c0) + eta * (c2 - c3)
    d_eta = (1 - xi) * (c3 - c0) + xi * (c2 - c1)
    jacobian = np.linalg.norm(np.cross(d_xi, d_eta), axis=-1)
    return jacobian @ np.outer(GAUSS_WEIGHTS, GAUSS_WEIGHTS).ravel()


def batch_hexahedron_volumes(corners: np.ndarray) -> np.ndarray:
    """
    Volumes of trilinear hexahedra by 2×2×2 Gauss quadrature of det J.

    Corners of shape (C, 8, 3) in the order (−,−,−), (+,−,−), (+,+,−), (−,+,−),
    then the same four with the third offset +.
    """
    signs = np.array([
        [-1, -1, -1], [1, -1, -1], [1, 1, -1], [-1, 1, -1],
        [-1, -1, 1], [1, -1, 1], [1, 1, 1], [-1, 1, 1],
    ], dtype=float)
    nodes = 2.0 * GAUSS_NODES - 1.0
    volumes = np.zeros(corners.shape[0])
    for a in nodes:
        for b in nodes:
            for c in nodes:
                reference = np.array([a, b, c])
                # derivative of the trilinear shape functions at the Gauss point
                grads = np.empty((8, 3))
                for axis in range(3):
                    factors = 1.0 + signs * reference
                    factors[:, axis] = signs[:, axis]
                    grads[:, axis] = np.prod(factors, axis=1) / 8.0
                jacobian = np.einsum("cnd,na->cda", corners, grads)
                # reference cube [-1,1]^3 has Gauss weights 1
                volumes += np.linalg.det(jacobian)
    return volumes


def diameter(points: np.ndarray) -> float:
    """Largest pairwise distance of a point set."""
    return float(pdist(np.asarray(points, dtype=float)).max())


def point_plane_distance(point: np.ndarray, origin: np.ndarray, normal: np.ndarray) -> float:
    unit = normal / np.linalg.norm(normal)
    return float(abs(np.dot(point - origin, unit)))


def point_line_distance(point: np.ndarray, start: np.ndarray, end: np.ndarray) -> float:
    direction = end - start
    return float(np.linalg.norm(np.cross(point - start, direction)) / np.linalg.norm(direction))


def decompose_normal(ntilde: np.ndarray, area: float, s: np.ndarray, t_circle: np.ndarray,
                     t_square: np.ndarray, tolerance: float = 1e-12, label: str = "face"):
    """
    Solve ñ = |σ| (s/β − (α°/β) t° − (α□/β) t□) for (β, α°, α□).

    Returns:
        Tuple[float, float, float, float]: beta, alpha_circle, alpha_square, det(s, t°, t□)

    Raises:
        MeshDegeneracyError: if the basis is singular or β is not positive
    """
    basis = np.column_stack([s, t_circle, t_square])
    det = float(np.linalg.det(basis))
    if abs(det) < tolerance:
        raise MeshDegeneracyError(f"{label}: degenerate basis, |det(s, t°, t□)| = {abs(det):.3e}")
    a = np.linalg.solve(basis, ntilde / area)
    if a[0] <= 0.0:
        raise MeshDegeneracyError(f"{label}: normal and x_p→x_q point to opposite sides (β <= 0)")
    beta = 1.0 / a[0]
    return beta, -a[1] * beta, -a[2] * beta, det


def batch_decompose(ntilde: np.ndarray, areas: np.ndarray, s: np.ndarray, t_circle: np.ndarray,
                    t_square: np.ndarray, tolerance: float = 1e-12):
    """
    Vectorised :func:`decompose_normal` over F faces.

    Returns:
        Tuple of arrays (beta, alpha_circle, alpha_square, det) and the index of the
        first singular face and of the first face with β <= 0 (-1 when none).
    """
    basis = np.stack([s, t_circle, t_square], axis=-1)
    det = np.linalg.det(basis)
    singular = np.flatnonzero(np.abs(det) < tolerance)
    if singular.size:
        return None, int(singular[0]), -1
    a = np.linalg.solve(basis, (ntilde / areas[:, None])[..., None])[..., 0]
    flipped = np.flatnonzero(a[:, 0] <= 0.0)
    if flipped.size:
        return None, -1, int(flipped[0])
    beta = 1.0 / a[:, 0]
    return (beta, -a[:, 1] * beta, -a[:, 2] * beta, det), -1, -1
