import numpy as np
import pytest

from coconet.model import validate_network

W75 = [[0.0, 0.75], [0.75, 0.0]]


@pytest.fixture
def fair_net():
    return validate_network([1, 1], [8, 8], [8, 8], W75)


@pytest.fixture
def subfair_net():
    return validate_network([1, 1], [12, 12], [8, 8], W75)


@pytest.fixture
def superfair_net():
    return validate_network([1, 1], [4, 4], [8, 8], W75)


@pytest.fixture
def mixed_net():
    return validate_network([1, 1], [8, 4], [8, 8], W75)


@pytest.fixture
def fp_net():
    """Super-fair pair whose fair reference has c = l = 6, w = 0.6."""
    return validate_network([1, 1], [3.5, 0.1], [6, 6], [[0, 0.6], [0.6, 0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
