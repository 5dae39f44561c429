import numpy as np
import pytest

from holosense import UpaGeometry
from holosense.kernels import warmup


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # Trigger JIT compilation once so timed sections measure steady state.
    warmup()


@pytest.fixture
def geom16():
    return UpaGeometry.half_wavelength(16, 16)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
