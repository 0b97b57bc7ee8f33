import numpy as np
import pytest

from ote.dataset import Dataset


def make_toy(n=60, d=5, seed=0, noise=0.15) -> Dataset:
    """Threshold-rule dataset with label noise; always contains both classes."""
    rng = np.random.default_rng(seed)
    X = rng.random((n, d))
    y = (X[:, 0] > 0.5).astype(np.int64)
    flip = rng.random(n) < noise
    y[flip] = 1 - y[flip]
    if y.min() == y.max():
        y[0] = 1 - y[0]
    return Dataset(X, y, tuple(f"f{i}" for i in range(d)))


@pytest.fixture
def toy_data():
    return make_toy()
