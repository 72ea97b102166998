import math

import numpy as np
import pytest
import scipy.sparse as sp

from netlabel.errors import EmptyInputError, InputError
from netlabel.graph import (AttributedGraph, EdgeSet, LabelSet, SparseCountVector, bfs_order,
                            degree_stats, neighborhood)
from oracles import bfs_distances


def test_sparse_vector_rejects_unsorted_and_negative():
    with pytest.raises(InputError):
        SparseCountVector(np.array([2, 1]), np.array([1, 1]))
    with pytest.raises(InputError):
        SparseCountVector(np.array([0, 1]), np.array([1, -1]))
    v = SparseCountVector.from_dense([0, 3, 0, 2])
    assert v.indices.tolist() == [1, 3] and v.values.tolist() == [3, 2]


def test_edges_reject_loops_duplicates_and_range():
    with pytest.raises(InputError):
        EdgeSet.from_arcs(3, [0], [0])
    with pytest.raises(InputError):
        EdgeSet.from_arcs(3, [0, 0], [1, 1])
    with pytest.raises(InputError):
        EdgeSet.from_arcs(3, [0], [3])
    with pytest.raises(InputError):
        EdgeSet.from_pairs(3, [(0, 1), (1, 0)])


def test_pairs_are_stored_as_two_arcs():
    e = EdgeSet.from_pairs(4, [(0, 2), (1, 2)])
    assert e.num_arcs == 4 and e.num_pairs() == 2 and e.symmetric
    assert neighborhood(e, 2).tolist() == [0, 1]
    assert e.pairs().tolist() == [[0, 2], [1, 2]]


def test_adjacency_is_read_only():
    e = EdgeSet.from_pairs(3, [(0, 1)])
    with pytest.raises(ValueError):
        e.indices[0] = 2


def test_labelset_checks_values_and_stored_prevalence():
    with pytest.raises(InputError):
        LabelSet("x", np.array([0, 2]))
    with pytest.raises(InputError):
        LabelSet("x", np.array([0, 1]), 0.9)
    L = LabelSet("x", np.array([0, 1, 1, 0]))
    assert L.prevalence == 0.5 and L.positives().tolist() == [1, 2]


def test_graph_rejects_mismatched_parts():
    e = EdgeSet.from_pairs(3, [(0, 1)])
    with pytest.raises(InputError):
        AttributedGraph(3, e, sp.csr_matrix((2, 4)), {})
    with pytest.raises(InputError):
        AttributedGraph(3, e, sp.csr_matrix((3, 4)), {"x": LabelSet("x", np.array([0, 1]))})


def test_bfs_order_is_level_sorted_and_excludes_source(rng):
    n = 40
    pairs = {tuple(sorted(p)) for p in rng.integers(0, n, size=(80, 2)) if p[0] != p[1]}
    e = EdgeSet.from_pairs(n, sorted(pairs))
    adj = [neighborhood(e, i).tolist() for i in range(n)]
    for source in range(n):
        dist = bfs_distances(adj, source)
        order = bfs_order(e, source, n)
        assert source not in order.tolist()
        assert sorted(order.tolist()) == sorted(v for v in dist if v != source)
        levels = [dist[v] for v in order.tolist()]
        assert levels == sorted(levels)
        for level in set(levels):
            members = [v for v in order.tolist() if dist[v] == level]
            assert members == sorted(members)
        assert bfs_order(e, source, 3).tolist() == order[:3].tolist()


def test_bfs_order_validates():
    e = EdgeSet.from_pairs(3, [(0, 1)])
    with pytest.raises(InputError):
        bfs_order(e, 0, 0)
    with pytest.raises(InputError):
        bfs_order(e, 5, 1)
    assert bfs_order(e, 2, 5).tolist() == []


def test_degree_stats():
    e = EdgeSet.from_pairs(4, [(0, 1), (0, 2), (0, 3)])
    s = degree_stats(e)
    assert s.median_degree == 1.0
    expected = 1 + 4 / (math.log(3) + 3 * math.log(1))
    assert s.alpha == pytest.approx(expected)
    with pytest.raises(EmptyInputError):
        degree_stats(EdgeSet.from_pairs(3, np.empty((0, 2))))
