import numpy as np
import pytest

from omegafn import OmegaEvaluator, Potential


@pytest.fixture(scope="session")
def ev1():
    return OmegaEvaluator(Potential(1))


@pytest.fixture(scope="session")
def ev2():
    return OmegaEvaluator(Potential(2))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
