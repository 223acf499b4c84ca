"""Shared fixtures: small grids and configs the unit tests reuse."""
import numpy as np
import pytest

from oscenv import EnvConfig, Grid2D


@pytest.fixture
def weak_cfg():
    """Weak symmetric noise, the default parameter row."""
    return EnvConfig(eps_r=0.01, eps_i=0.01, gamma=2.0, nu=0.5)


@pytest.fixture
def small_grid():
    """Odd node counts so both axes have exact mirror nodes."""
    return Grid2D.centered(M=21, L=17, du1=0.1, du2=0.05)


@pytest.fixture
def square_grid():
    return Grid2D.centered(M=41, L=41, du1=0.1, du2=0.1)


def gaussian_on(grid, center, width, height=1.0):
    """Plain Gaussian bump with a zeroed boundary ring, for test inputs."""
    u1 = grid.u1[None, :]
    u2 = grid.u2[:, None]
    v = height * np.exp(-(((u1 - center[0]) / width) ** 2 + ((u2 - center[1]) / width) ** 2))
    v[0, :] = 0.0
    v[-1, :] = 0.0
    v[:, 0] = 0.0
    v[:, -1] = 0.0
    return v
