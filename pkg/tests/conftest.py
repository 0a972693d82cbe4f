import numpy as np
import pytest

from v2xcov import ScenarioConfig
from v2xcov.analytic import clear_cache


@pytest.fixture
def table2():
    return ScenarioConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def _fresh_cache():
    clear_cache()
    yield
