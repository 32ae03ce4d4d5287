import numpy as np
import pytest

from moyal_vortex import ComplexField2D, MoyalParams, make_grid


@pytest.fixture(scope="session")
def grid128():
    return make_grid(128, 8.0)


@pytest.fixture(scope="session")
def grid64():
    return make_grid(64, 8.0)


@pytest.fixture(scope="session")
def grid256():
    return make_grid(256, 8.0)


@pytest.fixture(scope="session")
def theta1():
    return MoyalParams(theta=1.0)


def smooth_field(grid, seed, degree=3, decay=0.5):
    """Random polynomial-times-Gaussian field: entire, Gaussian-decaying
    spectrum, the contract under which the star-product wrap error is
    negligible."""
    rng = np.random.default_rng(seed)
    z = grid.x_mesh + 1j * grid.y_mesh
    coef = rng.normal(size=(degree + 1, degree + 1)) + 1j * rng.normal(
        size=(degree + 1, degree + 1)
    )
    poly = sum(
        coef[i, j] * z**i * np.conj(z) ** j
        for i in range(degree + 1)
        for j in range(degree + 1)
    )
    return ComplexField2D(grid, poly * np.exp(-decay * grid.r_mesh**2))


def rel_l2(a: ComplexField2D, b: ComplexField2D) -> float:
    num = np.sqrt(np.sum(np.abs(a.values - b.values) ** 2))
    den = np.sqrt(np.sum(np.abs(b.values) ** 2))
    return float(num / den)
