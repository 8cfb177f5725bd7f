"""Shared fixtures and field generators for the test suite."""

import pytest

from oldroyd2d.ensembles import random_scalar, random_tensor, random_vector
from oldroyd2d.grid import TorusGrid


def make_random_scalar(grid, seed, decay=2.5, amplitude=1.0, band_limited=True):
    return random_scalar(grid, seed, decay, amplitude, band_limited)


def make_random_vector(grid, seed, decay=2.5, amplitude=1.0, solenoidal=True):
    return random_vector(grid, seed, decay, amplitude, solenoidal)


def make_random_tensor(grid, seed, decay=2.5, amplitude=1.0):
    return random_tensor(grid, seed, decay, amplitude)


@pytest.fixture(scope="session")
def grid16():
    return TorusGrid(16)


@pytest.fixture(scope="session")
def grid32():
    return TorusGrid(32)


@pytest.fixture(scope="session")
def grid64():
    return TorusGrid(64)
