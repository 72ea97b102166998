import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from conftest import random_counts
from netlabel.errors import InputError
from netlabel.graph import SparseCountVector
from netlabel.similarity import s_cos, s_int, topk_global, topk_per_node
from oracles import brute_score, brute_topk_global, brute_topk_per_node, dense_rows

counts = st.lists(st.integers(0, 6), min_size=5, max_size=5)


@given(counts, counts)
def test_pairwise_scores_match_reference(a, b):
    va, vb = SparseCountVector.from_dense(a), SparseCountVector.from_dense(b)
    assert s_int(va, vb) == brute_score(a, b, "intersection")
    assert s_cos(va, vb) == brute_score(a, b, "cosine")
    assert s_int(va, vb) == s_int(vb, va)
    assert s_cos(va, vb) == s_cos(vb, va)


def test_known_values():
    a = SparseCountVector.from_dense([2, 0, 3])
    b = SparseCountVector.from_dense([1, 4, 5])
    assert s_int(a, b) == 4
    assert s_cos(a, a) == 1.0
    assert s_cos(a, SparseCountVector.from_dense([0, 7, 0])) == 0.0
    assert s_cos(a, SparseCountVector.from_dense([0, 0, 0])) == 0.0


def _as_triples(pairs):
    return [(int(p.i), int(p.j), p.score) for p in pairs]


@pytest.mark.parametrize("similarity", ["intersection", "cosine"])
def test_topk_per_node_matches_brute_force(similarity, rng):
    for _ in range(15):
        n, d = int(rng.integers(2, 30)), int(rng.integers(1, 8))
        A = random_counts(rng, n, d, density=0.3, high=4)
        k = int(rng.integers(1, 6))
        got = _as_triples(topk_per_node(A, similarity, k))
        assert got == brute_topk_per_node(dense_rows(A), similarity, k)


@pytest.mark.parametrize("similarity", ["intersection", "cosine"])
def test_topk_global_matches_brute_force(similarity, rng):
    for _ in range(15):
        n, d = int(rng.integers(2, 30)), int(rng.integers(1, 8))
        A = random_counts(rng, n, d, density=0.3, high=4)
        lam = int(rng.integers(1, 40))
        got = _as_triples(topk_global(A, similarity, lam))
        assert got == brute_topk_global(dense_rows(A), similarity, lam)


def test_workers_do_not_change_selection(rng):
    A = random_counts(rng, 150, 20, density=0.15)
    for sim in ("intersection", "cosine"):
        assert _as_triples(topk_per_node(A, sim, 4, workers=3)) == _as_triples(topk_per_node(A, sim, 4))
        assert _as_triples(topk_global(A, sim, 90, workers=3)) == _as_triples(topk_global(A, sim, 90))


def test_zero_rows_have_no_peers():
    A = sp.csr_matrix(np.array([[0, 0], [1, 2], [2, 1]]))
    got = _as_triples(topk_per_node(A, "intersection", 5))
    assert all(i != 0 and j != 0 for i, j, _ in got)
    assert [(i, j) for i, j, _ in got] == [(1, 2), (2, 1)]


def test_rejects_bad_arguments():
    A = sp.csr_matrix(np.eye(3, dtype=np.int64))
    with pytest.raises(InputError):
        topk_per_node(A, "jaccard", 1)
    with pytest.raises(InputError):
        topk_per_node(A, "cosine", 0)
    with pytest.raises(InputError):
        topk_global(sp.csr_matrix(np.array([[1, -1]])), "intersection", 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 5))
def test_topk_per_node_property(seed, k):
    r = np.random.default_rng(seed)
    A = random_counts(r, 12, 4, density=0.4)
    got = _as_triples(topk_per_node(A, "intersection", k))
    degrees = np.bincount([i for i, _, _ in got], minlength=12)
    rows = dense_rows(A)
    for i in range(12):
        peers = sum(1 for j in range(12) if j != i and brute_score(rows[i], rows[j], "intersection") > 0)
        assert degrees[i] == min(k, peers)
