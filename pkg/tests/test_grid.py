import numpy as np
import pytest
from hypothesis import given, strategies as st

from obliquefv_lib.core.errors import GridError
from obliquefv_lib.mesh.domains import DomainId, Tesseroid, get_domain
from obliquefv_lib.mesh.grid import PointKind, classify, generate_grid, perturbation


def test_unperturbed_cube_is_uniform_lattice():
    grid = generate_grid("cube", (3, 3, 3), 0.0, seed=5)
    assert grid.points.shape == (5, 5, 5, 3)
    expected = np.stack(np.meshgrid(*[np.arange(5) * 0.25] * 3, indexing="ij"), axis=-1)
    np.testing.assert_allclose(grid.points, expected, atol=1e-15)


def test_perturbation_is_bounded_and_tangential():
    grid = generate_grid(DomainId.CUBE, (9, 9, 9), 0.15, seed=42)
    uniform = generate_grid(DomainId.CUBE, (9, 9, 9)).points
    assert np.max(np.abs(grid.points - uniform)) <= 0.15 / 10 + 1e-15
    assert np.all(grid.points[0, :, :, 0] == 0.0)
    assert np.all(grid.points[-1, :, :, 0] == 1.0)
    assert np.all(grid.points[:, :, 0, 2] == 0.0)
    assert not np.allclose(grid.points[1:-1, 1:-1, 1:-1], uniform[1:-1, 1:-1, 1:-1])


def test_tesseroid_corner_maps_analytically():
    grid = generate_grid("tesseroid", (4, 4, 4))
    np.testing.assert_allclose(grid.points[0, 0, 0], [np.sin(3 * np.pi / 8), 0.0, np.cos(3 * np.pi / 8)],
                               atol=1e-14)
    assert np.linalg.norm(grid.points[2, 3, -1]) == pytest.approx(2.0)


def test_perturbed_sphere_outer_surface_is_untouched():
    grid = generate_grid("perturbed-sphere-section", (4, 4, 4), 0.1, seed=3)
    assert np.allclose(np.linalg.norm(grid.points[:, :, -1], axis=-1), 2.0)


def test_classification():
    kinds = classify((3, 4, 5))
    assert kinds.shape == (5, 6, 7)
    assert kinds[2, 2, 0] == PointKind.GAMMA
    assert kinds[0, 2, 0] == PointKind.DIRICHLET
    assert kinds[2, 2, 6] == PointKind.DIRICHLET
    assert kinds[2, 2, 3] == PointKind.INTERIOR


def test_same_seed_same_grid():
    a = generate_grid("tesseroid", (3, 3, 3), 0.2, seed=11)
    b = generate_grid("tesseroid", (3, 3, 3), 0.2, seed=11)
    c = generate_grid("tesseroid", (3, 3, 3), 0.2, seed=12)
    np.testing.assert_array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)


@given(seed=st.integers(min_value=0, max_value=2 ** 32), amplitude=st.floats(min_value=0.01, max_value=0.49))
def test_displacement_depends_only_on_index_and_seed(seed, amplitude):
    small = perturbation((3, 3, 3), amplitude, seed)
    tall = perturbation((3, 3, 5), amplitude, seed)
    # same spacing along the first two axes
    np.testing.assert_array_equal(small[1, 2, 1, :2], tall[1, 2, 1, :2])


@pytest.mark.parametrize("dims, amplitude, seed", [
    ((1, 3, 3), 0.1, 0),
    ((3, 3), 0.1, 0),
    ((3, 3, 3), 0.5, 0),
    ((3, 3, 3), -0.1, 0),
    ((3, 3, 3), 0.1, -1),
])
def test_invalid_requests(dims, amplitude, seed):
    with pytest.raises(GridError):
        generate_grid("cube", dims, amplitude, seed)


def test_unknown_domain():
    with pytest.raises(GridError, match="unknown domain"):
        get_domain("torus")


def test_domain_measures():
    assert get_domain("cube").volume() == 1.0
    tesseroid = Tesseroid()
    assert tesseroid.volume() == pytest.approx(7.0 / 3.0 * tesseroid.gamma_area())
    section = get_domain("perturbed-sphere-section")
    assert section.volume() == pytest.approx(tesseroid.volume(), rel=0.05)
