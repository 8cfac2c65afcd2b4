import numpy as np
import pytest

from tsrvlab import ProcessModel, SamplingGrid


@pytest.fixture
def model():
    return ProcessModel(mu=0.0, sigma=0.2, x0=0.0)


@pytest.fixture
def day_grid():
    return SamplingGrid(n=23400, T=1.0 / 252.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
