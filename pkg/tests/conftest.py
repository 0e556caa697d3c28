import numpy as np
import pytest
from hypothesis import settings

from projangles import _accel

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session", autouse=True)
def _compiled_kernels():
    # compile once so that timed checks measure the numerics, not the JIT
    _accel.warmup()


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)
