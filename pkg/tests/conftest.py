import numpy as np
import pytest

from src.policy import CLASSICAL_TOPOLOGY, init_classical_model
from src.qtgen import build_model
from src.verify import tiny_model as make_tiny_model


@pytest.fixture
def qt_model():
    """Full-size n = 10 generator with a single ansatz block."""
    return build_model(1, seed=7)


@pytest.fixture
def tiny_model():
    """n = 4 generator for the 15-weight (2-2, 2-3) policy."""
    return make_tiny_model()


@pytest.fixture
def classical_model():
    return init_classical_model(CLASSICAL_TOPOLOGY, seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
