import sys
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse as sp

sys.path.insert(0, str(Path(__file__).parent))

from netlabel.graph import AttributedGraph, EdgeSet, LabelSet  # noqa: E402


def random_counts(rng, n, d, density=0.2, high=6):
    dense = rng.integers(1, high, size=(n, d)) * (rng.random((n, d)) < density)
    return sp.csr_matrix(dense.astype(np.int64))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def path_graph():
    """0-1-2-3-4 with two labelsets."""
    e = EdgeSet.from_pairs(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    A = sp.csr_matrix(np.array([[3, 0, 1], [2, 1, 0], [0, 4, 0], [0, 3, 1], [1, 0, 5]]))
    labels = {"a": LabelSet("a", np.array([1, 1, 0, 0, 1], dtype=np.uint8)),
              "b": LabelSet("b", np.array([0, 1, 1, 1, 0], dtype=np.uint8))}
    return AttributedGraph(5, e, A, labels)


@pytest.fixture(scope="session")
def small_battery():
    from netlabel.synth import GenreRule, SynthConfig, generate_synthetic
    genres = tuple(GenreRule(f"g{k}", prevalence=0.2, locality=0.4 * k, num_artists=40, slice_size=10)
                   for k in range(3))
    cfg = SynthConfig(num_nodes=160, num_dimensions=400, num_communities=4, target_degree=10,
                      genres=genres, seed=3)
    return generate_synthetic(cfg)[0]
