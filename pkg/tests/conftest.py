import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from omegaorth.measure import Measure
from omegaorth.recurrence import generate

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# Example 1 table as printed (7 decimals)
EXAMPLE1_BETA = [-0.4244132, -0.3029978, -0.2398161, -0.2003582, -0.1730831, -0.1529639]
EXAMPLE1_ALPHA = [0.2229581, 0.2408213, 0.2455306, 0.2473987, 0.2483152]


@pytest.fixture(scope="session")
def one_minus_x():
    return Measure.builtin("one_minus_x")


@pytest.fixture(scope="session")
def example1_table(one_minus_x):
    return generate(one_minus_x, 14)


@pytest.fixture(scope="session")
def gegenbauer_table():
    return generate(Measure.builtin("gegenbauer_eta", **{"lambda": 0.75, "eta": 0.5}), 12)


@pytest.fixture(scope="session")
def legendre_table():
    return generate(Measure.builtin("gegenbauer_eta", **{"lambda": 0.5, "eta": 0.0}), 12)


@pytest.fixture
def rng():
    return np.random.default_rng(0x5EED)
