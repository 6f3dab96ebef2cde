import numpy as np
import pytest

from ofdrshape.calibration import PUBLISHED_MODEL


@pytest.fixture
def model():
    return PUBLISHED_MODEL


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
