import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from obliquefv_lib.analysis.cases import affine_solution, get_case
from obliquefv_lib.mesh.grid import generate_grid
from obliquefv_lib.mesh.mesh import build_mesh

settings.register_profile(
    "fast", max_examples=10, deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture, HealthCheck.too_slow],
)
settings.register_profile(
    "ci", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture, HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "fast"))


@pytest.fixture(scope="session")
def uniform_cube():
    return build_mesh(generate_grid("cube", (3, 3, 3)))


@pytest.fixture(scope="session")
def perturbed_cube():
    return build_mesh(generate_grid("cube", (5, 5, 5), 0.15, 42))


@pytest.fixture(scope="session")
def small_cube():
    return build_mesh(generate_grid("cube", (4, 4, 4), 0.15, 42))


@pytest.fixture(scope="session")
def tesseroid_mesh():
    return build_mesh(generate_grid("tesseroid", (4, 4, 4), 0.1, 7))


@pytest.fixture(scope="session")
def constant_case():
    return get_case("cube-constant")


def affine_case(offset, slope, name="cube-constant"):
    """A built-in case with its exact solution replaced by a + b·x."""
    return get_case(name).with_solution(*affine_solution(offset, np.asarray(slope, dtype=float)))
