import numpy as np
import pytest

from netreal import packaged_system


@pytest.fixture
def rng():
    return np.random.default_rng(20250819)


@pytest.fixture(scope="session")
def river():
    real, graph, _ = packaged_system("river")
    return real, graph


@pytest.fixture(scope="session")
def river_wide():
    real, graph, _ = packaged_system("river_bar")
    return real, graph


@pytest.fixture(scope="session")
def river_q():
    real, _, _ = packaged_system("river_q")
    return real
