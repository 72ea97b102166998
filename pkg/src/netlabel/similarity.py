"""Similarity over sparse count vectors and all-pairs top-k selection.

Scores for a block of query rows are computed through an inverted index (the
CSC view of the attribute matrix): only nodes sharing at least one dimension
with the query are touched, which is exactly the set that can score above 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np
import scipy.sparse as sp

from .errors import InputError
from .graph import SparseCountVector, gather_rows
from .parallel import chunked, pmap

SIMILARITIES = ("intersection", "cosine")

# float64 accumulates integers exactly below 2**53
_EXACT_LIMIT = 2 ** 53
# cosine scores are quantized so that ties do not hinge on summation order
COSINE_DECIMALS = 12


def s_int(a: SparseCountVector, b: SparseCountVector):
    """Sum over shared dimensions of the smaller count."""
    _, ia, ib = np.intersect1d(a.indices, b.indices, assume_unique=True, return_indices=True)
    total = np.minimum(a.values[ia], b.values[ib]).sum()
    return total.item() if hasattr(total, "item") else total


def s_cos(a: SparseCountVector, b: SparseCountVector) -> float:
    if len(a) == 0 or len(b) == 0:
        return 0.0
    _, ia, ib = np.intersect1d(a.indices, b.indices, assume_unique=True, return_indices=True)
    va = a.values.astype(float)
    vb = b.values.astype(float)
    dot = float(np.dot(va[ia], vb[ib]))
    cos = dot / (float(np.linalg.norm(va)) * float(np.linalg.norm(vb)))
    return round(min(max(cos, 0.0), 1.0), COSINE_DECIMALS)


def similarity_function(name: str):
    if name == "intersection":
        return s_int
    if name == "cosine":
        return s_cos
    raise InputError(f"unknown similarity {name!r}; expected one of {SIMILARITIES}")


class ScoredPair(NamedTuple):
    i: int
    j: int
    score: float


@dataclass(frozen=True)
class ScoredPairs:
    """Column-oriented list of scored pairs; iterates as :class:`ScoredPair`."""

    i: np.ndarray
    j: np.ndarray
    score: np.ndarray

    def __len__(self):
        return int(self.i.size)

    def __iter__(self):
        for a, b, s in zip(self.i.tolist(), self.j.tolist(), self.score.tolist()):
            yield ScoredPair(a, b, s)

    def __getitem__(self, k):
        return ScoredPair(int(self.i[k]), int(self.j[k]), self.score[k].item())

    def __eq__(self, other):
        if not isinstance(other, ScoredPairs):
            return NotImplemented
        return (np.array_equal(self.i, other.i) and np.array_equal(self.j, other.j)
                and np.array_equal(self.score, other.score))


@numba.njit(cache=True)
def _int_block(indptr, indices, data, c_indptr, c_indices, c_data, lo, hi, n):
    out = np.zeros((hi - lo, n), dtype=np.int64)
    for r in range(hi - lo):
        for p in range(indptr[lo + r], indptr[lo + r + 1]):
            d, v = indices[p], data[p]
            for q in range(c_indptr[d], c_indptr[d + 1]):
                w = c_data[q]
                out[r, c_indices[q]] += v if v < w else w
    return out


class _Scorer:
    """Block scorer holding the CSR and CSC (inverted index) views of ``A``."""

    def __init__(self, A, similarity: str):
        if similarity not in SIMILARITIES:
            raise InputError(f"unknown similarity {similarity!r}; expected one of {SIMILARITIES}")
        A = sp.csr_matrix(A)
        A.sort_indices()
        if A.nnz and A.data.min() < 0:
            raise InputError("attribute counts must be non-negative")
        self.similarity = similarity
        self.n = A.shape[0]
        self.integer = np.issubdtype(A.data.dtype, np.integer)
        if similarity == "cosine":
            data = A.data.astype(float)
            norms = np.sqrt(np.bincount(np.repeat(np.arange(self.n), np.diff(A.indptr)),
                                        weights=data * data, minlength=self.n))
            scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
            self.normed = sp.csr_matrix((data * np.repeat(scale, np.diff(A.indptr)),
                                         A.indices, A.indptr), shape=A.shape)
            self.normed_t = self.normed.T.tocsr()
        else:
            self.csr = A
            self.csc = A.tocsc()
            self.csc.sort_indices()
            if self.integer:
                self.int_data = (A.data.astype(np.int64), self.csc.data.astype(np.int64))
            if self.integer and A.nnz and A.data.sum() >= _EXACT_LIMIT:
                raise InputError("attribute totals too large for exact intersection scores")

    @property
    def dtype(self):
        if self.similarity == "intersection" and self.integer:
            return np.int64
        return np.float64

    def block(self, lo: int, hi: int) -> np.ndarray:
        """Dense ``(hi - lo, n)`` scores of rows ``lo..hi`` against every node."""
        if self.similarity == "cosine":
            out = (self.normed[lo:hi] @ self.normed_t).toarray()
            np.clip(out, 0.0, 1.0, out=out)
            return np.round(out, COSINE_DECIMALS)
        A, C = self.csr, self.csc
        if self.integer:
            data, c_data = self.int_data
            return _int_block(A.indptr, A.indices, data, C.indptr, C.indices, c_data, lo, hi, self.n)
        rows = np.arange(lo, hi)
        q_dims = gather_rows(A.indptr, A.indices, rows)
        q_vals = gather_rows(A.indptr, A.data, rows)
        q_owner = np.repeat(np.arange(hi - lo), np.diff(A.indptr)[lo:hi])
        col_len = C.indptr[q_dims + 1] - C.indptr[q_dims]
        peer = gather_rows(C.indptr, C.indices, q_dims)
        peer_val = gather_rows(C.indptr, C.data, q_dims)
        mins = np.minimum(peer_val, np.repeat(q_vals, col_len))
        keys = np.repeat(q_owner, col_len) * self.n + peer
        out = np.bincount(keys, weights=mins, minlength=(hi - lo) * self.n)
        return out.reshape(hi - lo, self.n)


def _select_top(scores: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` best positive scores, ordered by (score desc, index asc)."""
    cand = np.flatnonzero(scores > 0)
    if cand.size > k:
        kth = np.partition(scores[cand], cand.size - k)[cand.size - k]
        cand = cand[scores[cand] >= kth]
    order = np.lexsort((cand, -scores[cand]))
    return cand[order[:k]]


def _block_size(n: int) -> int:
    return max(1, min(256, 4_000_000 // max(n, 1)))


def _per_node_chunk(state, bounds):
    scorer, k = state
    lo, hi = bounds
    block = scorer.block(lo, hi)
    out_i, out_j, out_s = [], [], []
    for r in range(hi - lo):
        i = lo + r
        row = block[r]
        row[i] = 0
        top = _select_top(row, k)
        out_i.append(np.full(top.size, i, dtype=np.int64))
        out_j.append(top)
        out_s.append(row[top])
    return out_i, out_j, out_s


def topk_per_node(A, similarity: str, k: int, workers: int = 1) -> ScoredPairs:
    """For every node, its ``k`` most similar peers with positive score.

    Pairs are ordered by node, then score descending, then peer id ascending.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    scorer = _Scorer(A, similarity)
    parts = pmap(_per_node_chunk, chunked(scorer.n, _block_size(scorer.n)), workers,
                 shared=(scorer, k))
    return _concat(parts, scorer.dtype)


def _merge_global(i, j, s, lam):
    order = np.lexsort((j, i, -s))[:lam]
    return i[order], j[order], s[order]


def _global_chunk(state, bounds):
    scorer, lam = state
    lo, hi = bounds
    block = scorer.block(lo, hi)
    out_i, out_j, out_s = [], [], []
    for r in range(hi - lo):
        i = lo + r
        row = block[r, i + 1:]
        top = _select_top(row, lam)
        out_i.append(np.full(top.size, i, dtype=np.int64))
        out_j.append(top + i + 1)
        out_s.append(row[top])
    i, j, s = (np.concatenate(x) for x in (out_i, out_j, out_s))
    return _merge_global(i, j, s.astype(scorer.dtype), lam)


def topk_global(A, similarity: str, lam: int, workers: int = 1) -> ScoredPairs:
    """The ``lam`` most similar unordered pairs ``i < j`` with positive score.

    Ordered by score descending, then ``i``, then ``j``.
    """
    if lam < 1:
        raise InputError("lambda must be >= 1")
    scorer = _Scorer(A, similarity)
    parts = pmap(_global_chunk, chunked(scorer.n, _block_size(scorer.n)), workers,
                 shared=(scorer, lam))
    if not parts:
        return _concat([], scorer.dtype)
    i = np.concatenate([p[0] for p in parts])
    j = np.concatenate([p[1] for p in parts])
    s = np.concatenate([p[2] for p in parts]).astype(scorer.dtype)
    i, j, s = _merge_global(i, j, s, lam)
    return ScoredPairs(i, j, s)


def _concat(parts, dtype) -> ScoredPairs:
    flat_i = [x for p in parts for x in p[0]]
    flat_j = [x for p in parts for x in p[1]]
    flat_s = [x for p in parts for x in p[2]]
    if not flat_i:
        empty = np.empty(0, dtype=np.int64)
        return ScoredPairs(empty, empty.copy(), np.empty(0, dtype=dtype))
    return ScoredPairs(np.concatenate(flat_i), np.concatenate(flat_j),
                       np.concatenate(flat_s).astype(dtype))
