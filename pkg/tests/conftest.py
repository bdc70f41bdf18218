import time

import numpy as np
import pytest
from hypothesis import settings

from apollon import HalfSpace, qh_distance

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session", autouse=True)
def jit_warmup():
    """Compile the lattice kernel once so timed tests measure the solver only."""
    t = time.perf_counter()
    qh_distance(HalfSpace([0.0, 1.0], 0.0), [0.0, 1.0], [0.0, 1.5], 0.1)
    return time.perf_counter() - t


@pytest.fixture
def half_plane():
    return HalfSpace([0.0, 1.0], 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
