import numpy as np
import pytest

from scsc.adjacency import AdjacencyMatrix


@pytest.fixture
def block_matrix():
    """Two weakly-coupled pairs: {0,1} and {2,3} are mutually dissimilar."""
    return AdjacencyMatrix(
        np.array(
            [
                [0.0, 0.1, 1.0, 1.0],
                [0.1, 0.0, 1.0, 1.0],
                [1.0, 1.0, 0.0, 0.1],
                [1.0, 1.0, 0.1, 0.0],
            ]
        )
    )


def random_adjacency(rng, n):
    a = rng.random((n, n))
    a = 0.5 * (a + a.T)
    np.fill_diagonal(a, 0.0)
    return AdjacencyMatrix(a)


def random_distribution(rng, m):
    p = rng.random(m)
    return p / p.sum()
