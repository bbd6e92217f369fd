import numpy as np
import pytest

from transwass import DiscreteMeasure


def random_measure(rng, n, d=2, equal_weights=False, scale=1.0, shift=0.0):
    positions = shift + scale * rng.random((n, d))
    if equal_weights:
        weights = np.full(n, 1.0 / n)
    else:
        weights = rng.uniform(0.2, 1.0, size=n)
        weights /= weights.sum()
    return DiscreteMeasure(positions, weights)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
