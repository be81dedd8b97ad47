import numpy as np
import pytest

from shmod import Grid, RealField


@pytest.fixture
def grid() -> Grid:
    """Small grid at eps = 0.1 for fast unit tests."""
    return Grid.for_carrier(0.1, 1024, periods=64)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def random_field(grid, rng) -> RealField:
    return RealField(grid, rng.standard_normal(grid.n_points))
