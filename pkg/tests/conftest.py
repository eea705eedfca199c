import numpy as np
import pytest

from opintegral.rng import Xorshift64Star


@pytest.fixture
def rng():
    return Xorshift64Star(20240915)


def random_hermitian(rng, n, scale=1.0):
    return rng.hermitian(n, scale)


def op_norm(m):
    return float(np.linalg.norm(m, 2))
