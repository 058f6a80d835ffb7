import numpy as np
import pytest

from corrdyn import gallery
from corrdyn.measures import TestDictionary


@pytest.fixture(scope="session")
def dictionary():
    return TestDictionary(l_max=8)


@pytest.fixture(scope="session")
def lin():
    return gallery.linear_pair()


@pytest.fixture(scope="session")
def sq():
    return gallery.squaring_map()


@pytest.fixture(scope="session")
def hyp():
    return gallery.hyperbola()


@pytest.fixture(scope="session")
def self_adjoint():
    return gallery.self_adjoint_squarer()


def rng(seed):
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))
