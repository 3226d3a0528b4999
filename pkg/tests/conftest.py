import numpy as np
import pytest

from born_series_lab.scattering.forward import generate_dataset
from born_series_lab.scattering.grid import make_grid, physical_axes
from born_series_lab.scattering.scene import make_cutoff
from born_series_lab.scattering.schema import Field, PotentialSpec


def bump(spec, radius=1.0, center=(0.0, 0.0)) -> Field:
    """Bump cos^4(pi r / 2) of the given radius, zero outside"""
    x1, x2 = physical_axes(spec)
    r = np.hypot(x1 - center[0], x2 - center[1]) / radius
    return Field(spec=spec, data=np.where(r < 1, np.cos(np.pi * r / 2) ** 4, 0.0))


def gaussian(spec, width, center=(0.0, 0.0)) -> Field:
    x1, x2 = physical_axes(spec)
    return Field(spec=spec, data=np.exp(-((x1 - center[0]) ** 2 + (x2 - center[1]) ** 2) / (2 * width**2)))


@pytest.fixture
def grid32():
    return make_grid(32, 2.1)


@pytest.fixture
def grid16():
    return make_grid(16, 2.1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def weak_example2_data():
    """Example 2 at amplitude 0.1 seen on a 32 x 32 inverse grid"""
    return generate_dataset(PotentialSpec.scaled(PotentialSpec.example2(), 0.1), make_grid(32, 2.1))


@pytest.fixture(scope="session")
def half_example2_data():
    """Example 2 at amplitude 0.5 seen on a 32 x 32 inverse grid"""
    return generate_dataset(PotentialSpec.scaled(PotentialSpec.example2(), 0.5), make_grid(32, 2.1))


@pytest.fixture(scope="session")
def cutoff32():
    spec = make_grid(32, 2.1)
    return make_cutoff(spec, 1.45, 2.0)
