"""Random forest of CART trees (Gini, bootstrap, per-split feature sampling).

Tree growth runs in a numba kernel. Randomness inside the kernel comes from a
splitmix64 stream seeded per tree from the caller's numpy Generator, so results
depend only on that Generator's state.
"""
from __future__ import annotations

import math

import numba
import numpy as np


def majority(y) -> int:
    """Majority label of a 0/1 vector; ties go to 0."""
    y = np.asarray(y)
    return int(2 * int(y.sum()) > y.size)


@numba.njit(cache=True)
def _splitmix(state):
    state = state + np.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return state, z ^ (z >> np.uint64(31))


@numba.njit(cache=True)
def _below(state, bound):
    """Uniform integer in [0, bound)."""
    state, z = _splitmix(state)
    return state, np.int64(z % np.uint64(bound))


@numba.njit(cache=True)
def _grow_forest(XT, y, seeds, max_depth, mtry, max_nodes):
    n_trees = seeds.shape[0]
    d, m = XT.shape
    feat = np.full((n_trees, max_nodes), -1, np.int64)
    thr = np.zeros((n_trees, max_nodes))
    left = np.full((n_trees, max_nodes), -1, np.int64)
    right = np.full((n_trees, max_nodes), -1, np.int64)
    value = np.zeros((n_trees, max_nodes), np.int64)
    rows = np.empty(m, np.int64)
    pool = np.empty(d, np.int64)
    vals = np.empty(m)
    labs = np.empty(m, np.int64)
    st_node = np.empty(max_nodes, np.int64)
    st_lo = np.empty(max_nodes, np.int64)
    st_hi = np.empty(max_nodes, np.int64)
    st_depth = np.empty(max_nodes, np.int64)
    for t in range(n_trees):
        state = np.uint64(seeds[t])
        for r in range(m):
            state, rows[r] = _below(state, m)
        count = 1
        top = 0
        st_node[0] = 0
        st_lo[0] = 0
        st_hi[0] = m
        st_depth[0] = 0
        top = 1
        while top > 0:
            top -= 1
            node = st_node[top]
            lo = st_lo[top]
            hi = st_hi[top]
            depth = st_depth[top]
            k = hi - lo
            pos = 0
            for r in range(lo, hi):
                pos += y[rows[r]]
            value[t, node] = 1 if 2 * pos > k else 0
            if depth >= max_depth or pos == 0 or pos == k or count + 2 > max_nodes:
                continue
            parent = pos * (k - pos) / k
            best_cost = parent - 1e-12
            best_f = -1
            best_thr = 0.0
            for f in range(d):
                pool[f] = f
            remaining = d
            tried = 0
            while tried < mtry and remaining > 0:
                state, pick = _below(state, remaining)
                f = pool[pick]
                remaining -= 1
                pool[pick] = pool[remaining]
                # counts are sparse: sort only the nonzero values and treat zeros as one run
                col = XT[f]
                nz = 0
                zero_pos = 0
                for r in range(lo, hi):
                    v = col[rows[r]]
                    if v == 0.0:
                        zero_pos += y[rows[r]]
                    else:
                        vals[nz] = v
                        labs[nz] = y[rows[r]]
                        nz += 1
                zeros = k - nz
                if nz == 0:
                    continue
                order = np.argsort(vals[:nz])
                if zeros == 0 and vals[order[0]] == vals[order[nz - 1]]:
                    continue
                tried += 1
                # scan distinct values in increasing order, with the zero run
                # slotted in before the first positive value
                lp = 0
                nl = 0
                prev = 0.0
                pending = zeros > 0
                s = 0
                while True:
                    if pending and (s == nz or vals[order[s]] > 0.0):
                        b, cnt, cpos = 0.0, zeros, zero_pos
                        pending = False
                    elif s < nz:
                        b, cnt, cpos = vals[order[s]], 1, labs[order[s]]
                        s += 1
                    else:
                        break
                    if nl > 0 and b > prev:
                        nr = k - nl
                        rp = pos - lp
                        cost = lp * (nl - lp) / nl + rp * (nr - rp) / nr
                        if cost < best_cost:
                            best_cost = cost
                            best_f = f
                            best_thr = 0.5 * (prev + b)
                    lp += cpos
                    nl += cnt
                    prev = b
            if best_f < 0:
                continue
            # partition rows[lo:hi] so the left child comes first
            i = lo
            j = hi - 1
            while i <= j:
                if XT[best_f, rows[i]] <= best_thr:
                    i += 1
                else:
                    tmp = rows[i]
                    rows[i] = rows[j]
                    rows[j] = tmp
                    j -= 1
            feat[t, node] = best_f
            thr[t, node] = best_thr
            left[t, node] = count
            right[t, node] = count + 1
            count += 2
            st_node[top] = count - 1
            st_lo[top] = i
            st_hi[top] = hi
            st_depth[top] = depth + 1
            top += 1
            st_node[top] = count - 2
            st_lo[top] = lo
            st_hi[top] = i
            st_depth[top] = depth + 1
            top += 1
    return feat, thr, left, right, value


@numba.njit(cache=True)
def _vote(X, feat, thr, left, right, value):
    n_trees = feat.shape[0]
    out = np.zeros(X.shape[0], np.int64)
    for r in range(X.shape[0]):
        votes = 0
        for t in range(n_trees):
            node = 0
            while feat[t, node] >= 0:
                if X[r, feat[t, node]] <= thr[t, node]:
                    node = left[t, node]
                else:
                    node = right[t, node]
            votes += value[t, node]
        out[r] = 1 if 2 * votes > n_trees else 0
    return out


class RandomForest:
    """Bagged CART trees voting by majority (ties go to 0).

    Each split draws features at random until ``ceil(sqrt(d))`` non-constant
    ones were examined. Fewer than ``min_rows`` training rows fall back to the
    majority label.
    """

    def __init__(self, n_trees: int = 50, max_depth: int = 8, min_rows: int = 5):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_rows = min_rows

    def fit(self, X, y, rng: np.random.Generator):
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.int64)
        self.constant = None
        if y.size < self.min_rows or y.min() == y.max():
            self.constant = majority(y)
            return self
        m, d = X.shape
        mtry = max(1, math.ceil(math.sqrt(d)))
        max_nodes = min(2 ** (self.max_depth + 1) - 1, 2 * m - 1)
        seeds = rng.integers(0, 2 ** 63, size=self.n_trees, dtype=np.int64)
        self.trees_ = _grow_forest(np.ascontiguousarray(X.T), y, seeds, self.max_depth, mtry, max_nodes)
        return self

    def predict(self, X) -> np.ndarray:
        X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
        if self.constant is not None:
            return np.full(X.shape[0], self.constant, dtype=np.int64)
        return _vote(X, *self.trees_)
