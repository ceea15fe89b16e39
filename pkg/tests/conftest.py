import os

import mpmath
import pytest
from hypothesis import HealthCheck, settings

from witten_rigidity.precision import PrecisionConfig

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def cfg():
    return PrecisionConfig(digits=60)


@pytest.fixture
def cfg30():
    return PrecisionConfig(digits=30)


@pytest.fixture(autouse=True)
def _restore_dps():
    # a test that leaks a raised working precision must not affect the next one
    dps = mpmath.mp.dps
    yield
    mpmath.mp.dps = dps


def relerr(a, b):
    a, b = mpmath.mpmathify(a), mpmath.mpmathify(b)
    return abs(a - b) / max(1, abs(b))
