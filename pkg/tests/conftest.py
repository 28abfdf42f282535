import numpy as np
import pytest

from detrep import BallShape, Colligation


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def disk():
    return BallShape([(1, 1)])


@pytest.fixture
def bidisk():
    return BallShape.polydisk(2)


@pytest.fixture
def two_state():
    # C A^N B = 0 for every N, so the transfer is the constant d
    shape = BallShape([(1, 1)])
    A = np.array([[0, 0], [0, 0.5]])
    return Colligation(shape, (2,), A, [[1], [0]], [[0, 1]], [[0.3]])


def cgauss(rng, *sz):
    return rng.standard_normal(sz) + 1j * rng.standard_normal(sz)
