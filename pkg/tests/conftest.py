import numpy as np
import pytest

from commoninfo.prob import dsbs, validate_and_trim


@pytest.fixture
def dsbs01():
    return dsbs(0.1)


@pytest.fixture
def two_block():
    p = np.zeros((4, 4))
    p[:2, :2] = 1 / 8
    p[2:, 2:] = 1 / 8
    return validate_and_trim(p)


@pytest.fixture
def identity2():
    return validate_and_trim(np.eye(2) / 2)


@pytest.fixture
def independent():
    return validate_and_trim(np.outer([0.3, 0.7], [0.6, 0.4]))
