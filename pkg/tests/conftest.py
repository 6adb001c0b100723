"""Shared fixtures and generators for the test suite."""

from pathlib import Path

import numpy as np
import pytest

from qlti.core import FrequencyGrid, MatrixFunction, random_group_element
from qlti.sdm import SpectralDensityMatrix, normal_form

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"


def random_contraction(seed: int, omega=(0.7,)) -> MatrixFunction:
    """Complex Gaussian 2x4 quadrature transfer scaled to spectral norm 0.9.

    At ``w = 0`` the sample is kept real so the reality symmetry holds.
    """
    rng = np.random.default_rng(seed)
    grid = FrequencyGrid(np.asarray(omega, dtype=float))
    samples = []
    for w in grid.omega:
        a = rng.standard_normal((2, 4))
        if w != 0.0:
            a = a + 1j * rng.standard_normal((2, 4))
        samples.append(0.9 * a / np.linalg.norm(a, 2))
    return MatrixFunction(grid, np.stack(samples), "transfer")


def random_physical_sdm(n: int, seed: int, omega=(0.7,)) -> SpectralDensityMatrix:
    """``M0 [[s, iD], [-iD, s]] M0^dagger`` with ``s >= 1/2 + |D| + 0.05``."""
    rng = np.random.default_rng(seed)
    grid = FrequencyGrid(np.asarray(omega, dtype=float))
    M0 = random_group_element(n, seed=seed + 10_000, magnitude=0.7, grid=grid)
    samples = []
    for k, w in enumerate(grid.omega):
        delta = 0.0 if w == 0.0 else rng.uniform(-1.0, 1.0, n)
        sigma = 0.55 + np.abs(delta) + rng.uniform(0.0, 1.0, n)
        m = M0.samples[k]
        samples.append(m @ normal_form(sigma, np.zeros(n) + delta) @ m.conj().T)
    return SpectralDensityMatrix(grid, np.stack(samples))


@pytest.fixture
def grid3():
    return FrequencyGrid(np.array([0.0, 0.5, 1.5]))
