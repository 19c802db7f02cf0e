import numpy as np
import pytest

from lgpr import Graph


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def path3():
    return Graph(np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float))


@pytest.fixture
def triangle():
    return Graph(np.ones((3, 3)) - np.eye(3))


def random_connected_graph(rng, n, p=0.25, weighted=False):
    """Erdos-Renyi-ish graph with a ring added so it stays connected."""
    draws = rng.random((n, n))
    upper = np.triu(draws < p, k=1)
    if weighted:
        weights = np.triu(rng.uniform(0.2, 2.0, (n, n)), k=1)
        W = np.where(upper, weights, 0.0)
    else:
        W = upper.astype(float)
    W = W + W.T
    for i in range(n):
        j = (i + 1) % n
        if W[i, j] == 0:
            W[i, j] = W[j, i] = 1.0
    return Graph(W)


def two_cliques_with_bridge(m):
    """Two K_m cliques joined by a single unit edge between nodes 0 and m."""
    W = np.zeros((2 * m, 2 * m))
    W[:m, :m] = 1.0
    W[m:, m:] = 1.0
    np.fill_diagonal(W, 0.0)
    W[0, m] = W[m, 0] = 1.0
    return Graph(W)
