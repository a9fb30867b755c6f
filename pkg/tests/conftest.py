import itertools

import numpy as np
import pytest

from pointline import _backend
from pointline.geometry import Configuration

BACKENDS = sorted(_backend.BACKENDS)

# Three-element base used for the depth-2 exploratory recursion (w = 1/8, C = 5).
# Dyadic coordinates; found by random search and checked to certify w^2 and w^4.
BASE3_W8 = [
    [-0.46875, 0.71875, 0.75],
    [-0.78125, -0.375, 0.75],
    [-0.4375, 0.90625, 0.4375],
]


def brute_oracle(coords):
    """Plain double loop over ordered pairs; independent of the kernels."""
    best = (float("inf"), -1, -1)
    for a, b in itertools.permutations(range(len(coords)), 2):
        xa, ya, _ = coords[a]
        xb, yb, tb = coords[b]
        d = abs(ya - yb - tb * (xa - xb))
        if (d, a, b) < best:
            best = (d, a, b)
    return best


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return _backend.get(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def base3():
    return Configuration(BASE3_W8, provenance="base3_w8")


@pytest.fixture
def singleton():
    return Configuration(np.zeros((1, 3)), provenance="singleton")


def random_configuration(rng, n, lattice=None):
    if lattice:
        c = rng.integers(-lattice, lattice + 1, (n, 3)) / lattice
        c = np.unique(c, axis=0)
    else:
        c = rng.uniform(-1, 1, (n, 3))
    return Configuration(c)


def dense_oracle(coords):
    """Minimum over the full distance matrix; for sizes too big for the double loop."""
    c = np.asarray(coords)
    x, y, t = c[:, 0], c[:, 1], c[:, 2]
    D = np.abs(y[:, None] - y[None, :] - t[None, :] * (x[:, None] - x[None, :]))
    np.fill_diagonal(D, np.inf)
    return float(D.min())
