import numpy as np
import pytest

from langevin.noise import ExponentSet, plan_grid, sample_noise
from utils.rng import RngSpec


@pytest.fixture
def rng():
    return RngSpec(seed=20240611)


@pytest.fixture
def uniform_noise(rng):
    """Factory for a d-dimensional realization on a uniform grid."""
    def build(Ns=64, T=1.0, d=1, extra=(), trial=0, eta=None):
        grid = plan_grid(Ns, T, eta)
        return sample_noise(grid, d, ExponentSet.of(*extra), rng.for_trial(trial))
    return build


@pytest.fixture
def sample_points():
    return np.linspace(-3.0, 3.0, 121)
