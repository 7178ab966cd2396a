"""
Pytest configuration and fixtures for spdkit tests.
"""

import numpy as np
import pytest


@pytest.fixture
def rng():
    """Seeded generator; every test gets the same stream."""
    return np.random.default_rng(20240611)


@pytest.fixture
def spd_factory(rng):
    """Random SPD matrices with a bounded condition number."""
    from spdkit.synthbench import random_spd

    def make(dim, condition_cap=100.0):
        return random_spd(dim, rng, condition_cap)

    return make


@pytest.fixture
def sym_factory(rng):
    """Random symmetric matrices with entries of order `scale`."""

    def make(dim, scale=1.0):
        a = rng.standard_normal((dim, dim)) * scale
        return (a + a.T) / 2.0

    return make


@pytest.fixture
def model_factory(spd_factory):
    """Convex class models of random SPD points."""
    from spdkit.mccm import ConvexClassModel

    def make(dim, n_points, label="A"):
        return ConvexClassModel(label, tuple(spd_factory(dim) for _ in range(n_points)))

    return make


def simplex_grid(n, steps):
    """All weight vectors on the simplex with entries that are multiples of 1/steps (n = 2 or 3)."""
    if n == 2:
        t = np.arange(steps + 1) / steps
        return np.stack([t, 1.0 - t], axis=1)
    i, j = np.meshgrid(np.arange(steps + 1), np.arange(steps + 1), indexing="ij")
    keep = i + j <= steps
    i, j = i[keep], j[keep]
    return np.stack([i, j, steps - i - j], axis=1) / steps
