import itertools

import numpy as np
import pytest
from hypothesis import settings

from trilab import graph_core as gc

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


def brute_codegrees(g):
    """Triangular co-degree table recounted from the dense adjacency matrix."""
    a = g.dense().astype(np.int64)
    common = a @ a
    return np.array([common[u, v] for v in range(g.n) for u in range(v)], dtype=np.int64)


def brute_triangle_count(g):
    a = g.dense()
    return sum(1 for x, y, z in itertools.combinations(range(g.n), 3)
               if a[x, y] and a[x, z] and a[y, z])


@pytest.fixture
def k4():
    return gc.new_complete(4)


@pytest.fixture
def k5():
    return gc.new_complete(5)


@pytest.fixture
def k4_minus_edge():
    return gc.from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 1)][:-1])
