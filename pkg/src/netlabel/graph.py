"""Attributed graph data model, neighborhoods and BFS node ordering."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .errors import EmptyInputError, InputError

PROVENANCES = ("observed", "knn", "threshold", "random")


@dataclass(frozen=True, eq=False)
class SparseCountVector:
    """One node's attribute row: strictly increasing dimension ids with positive counts."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=np.int64)
        values = np.asarray(self.values)
        if indices.shape != values.shape or indices.ndim != 1:
            raise InputError("indices and values must be 1-d arrays of equal length")
        if indices.size and np.any(np.diff(indices) <= 0):
            raise InputError("indices must be strictly increasing")
        if values.size and np.any(values <= 0):
            raise InputError("stored values must be positive")
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_dense(cls, dense) -> "SparseCountVector":
        dense = np.asarray(dense)
        nz = np.flatnonzero(dense)
        return cls(nz, dense[nz])

    def __len__(self):
        return int(self.indices.size)

    def total(self):
        return self.values.sum()


class EdgeSet:
    """Directed adjacency in CSR form.

    Observed friendships are stored as two arcs; ``symmetric`` records that
    every arc has its reverse so the set can be written back as pairs.
    """

    def __init__(self, num_nodes: int, indptr, indices, provenance: str = "observed",
                 symmetric: bool = False):
        if provenance not in PROVENANCES:
            raise InputError(f"unknown provenance {provenance!r}")
        self.num_nodes = int(num_nodes)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        self.provenance = provenance
        self.symmetric = bool(symmetric)

    @classmethod
    def from_arcs(cls, num_nodes: int, src, dst, provenance: str = "observed",
                  symmetric: bool = False) -> "EdgeSet":
        """Build from parallel arrays of arc endpoints; rejects loops and duplicates."""
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise InputError("src and dst must have equal length")
        if src.size:
            lo = min(src.min(), dst.min())
            hi = max(src.max(), dst.max())
            if lo < 0 or hi >= num_nodes:
                raise InputError("edge endpoint out of range")
            if np.any(src == dst):
                raise InputError("self-loops are not allowed")
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        if src.size > 1:
            dup = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
            if np.any(dup):
                k = int(np.flatnonzero(dup)[0])
                raise InputError(f"duplicate edge {src[k]}->{dst[k]}")
        indptr = np.zeros(num_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=num_nodes), out=indptr[1:])
        return cls(num_nodes, indptr, dst, provenance, symmetric)

    @classmethod
    def from_pairs(cls, num_nodes: int, pairs, provenance: str = "observed") -> "EdgeSet":
        """Undirected pairs, each stored as two arcs."""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        u, v = pairs[:, 0], pairs[:, 1]
        return cls.from_arcs(num_nodes, np.concatenate([u, v]), np.concatenate([v, u]),
                             provenance, symmetric=True)

    @property
    def num_arcs(self) -> int:
        return int(self.indices.size)

    def __len__(self):
        return self.num_arcs

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def arcs(self):
        """Return ``(src, dst)`` arrays in (src, dst) ascending order."""
        src = np.repeat(np.arange(self.num_nodes, dtype=np.int64), self.out_degrees())
        return src, self.indices.copy()

    def pairs(self) -> np.ndarray:
        """Unordered pairs ``u < v`` joined by an arc in either direction."""
        src, dst = self.arcs()
        u, v = np.minimum(src, dst), np.maximum(src, dst)
        packed = np.unique(u * self.num_nodes + v)
        return np.column_stack([packed // self.num_nodes, packed % self.num_nodes])

    def num_pairs(self) -> int:
        if self.symmetric:
            return self.num_arcs // 2
        return int(len(self.pairs()))

    def to_csr(self) -> sp.csr_matrix:
        data = np.ones(self.num_arcs, dtype=np.int8)
        return sp.csr_matrix((data, self.indices, self.indptr),
                             shape=(self.num_nodes, self.num_nodes))

    def __eq__(self, other):
        if not isinstance(other, EdgeSet):
            return NotImplemented
        return (self.num_nodes == other.num_nodes
                and self.provenance == other.provenance
                and self.symmetric == other.symmetric
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __repr__(self):
        return (f"EdgeSet(num_nodes={self.num_nodes}, arcs={self.num_arcs}, "
                f"provenance={self.provenance!r}, symmetric={self.symmetric})")


@dataclass(frozen=True, eq=False)
class LabelSet:
    name: str
    labels: np.ndarray
    prevalence: float = field(default=None)

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1:
            raise InputError("labels must be a 1-d vector")
        if labels.size and not np.all((labels == 0) | (labels == 1)):
            raise InputError(f"labelset {self.name!r} has entries outside {{0, 1}}")
        labels = labels.astype(np.uint8)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        computed = float(labels.sum() / labels.size) if labels.size else 0.0
        if self.prevalence is not None and abs(self.prevalence - computed) > 1e-12:
            raise InputError(f"labelset {self.name!r}: stored prevalence {self.prevalence} "
                             f"does not match labels ({computed})")
        object.__setattr__(self, "prevalence", computed)

    @property
    def num_positive(self) -> int:
        return int(self.labels.sum())

    def positives(self) -> np.ndarray:
        return np.flatnonzero(self.labels)

    def __len__(self):
        return int(self.labels.size)

    def __eq__(self, other):
        if not isinstance(other, LabelSet):
            return NotImplemented
        return self.name == other.name and np.array_equal(self.labels, other.labels)


class AttributedGraph:
    """Nodes ``0..num_nodes-1`` with an observed edge-set, count attributes and labelsets."""

    def __init__(self, num_nodes: int, edges: EdgeSet, attributes,
                 labelsets: Mapping[str, LabelSet] | None = None, num_dimensions: int | None = None):
        self.num_nodes = int(num_nodes)
        if edges.num_nodes != self.num_nodes:
            raise InputError("edge-set size does not match num_nodes")
        attributes = sp.csr_matrix(attributes)
        if num_dimensions is not None and attributes.shape[1] != num_dimensions:
            attributes = sp.csr_matrix((attributes.data, attributes.indices, attributes.indptr),
                                       shape=(attributes.shape[0], num_dimensions))
        if attributes.shape[0] != self.num_nodes:
            raise InputError("attribute matrix must have one row per node")
        attributes.sum_duplicates()
        attributes.eliminate_zeros()
        attributes.sort_indices()
        if attributes.nnz and attributes.data.min() < 0:
            raise InputError("attribute counts must be non-negative")
        self.edges = edges
        self.attributes = attributes
        self.labelsets = dict(labelsets or {})
        for name, ls in self.labelsets.items():
            if len(ls) != self.num_nodes:
                raise InputError(f"labelset {name!r} has {len(ls)} entries, expected {self.num_nodes}")

    @property
    def num_dimensions(self) -> int:
        return int(self.attributes.shape[1])

    def attribute_row(self, i: int) -> SparseCountVector:
        _check_node(i, self.num_nodes)
        lo, hi = self.attributes.indptr[i], self.attributes.indptr[i + 1]
        return SparseCountVector(self.attributes.indices[lo:hi], self.attributes.data[lo:hi])

    def with_edges(self, edges: EdgeSet) -> "AttributedGraph":
        return AttributedGraph(self.num_nodes, edges, self.attributes, self.labelsets)


def gather_rows(indptr, indices, rows):
    """Concatenate the CSR index slices of ``rows`` without a Python loop."""
    rows = np.asarray(rows, dtype=np.int64)
    starts = indptr[rows]
    lengths = indptr[rows + 1] - starts
    total = int(lengths.sum())
    if total == 0:
        return indices[:0]
    offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths)
    return indices[offsets + np.arange(total)]


def _check_node(i, num_nodes):
    if not 0 <= int(i) < num_nodes:
        raise InputError(f"node id {i} out of range [0, {num_nodes})")


def neighborhood(e: EdgeSet, i: int) -> np.ndarray:
    """Out-neighbors of ``i`` in ascending order."""
    _check_node(i, e.num_nodes)
    return e.indices[e.indptr[i]:e.indptr[i + 1]]


def bfs_order(e: EdgeSet, i: int, k: int) -> np.ndarray:
    """First ``k`` nodes other than ``i`` met by BFS from ``i``.

    Nodes are emitted level by level; inside a level they are ordered by id.
    """
    _check_node(i, e.num_nodes)
    if k < 1:
        raise InputError("k must be >= 1")
    visited = np.zeros(e.num_nodes, dtype=bool)
    visited[i] = True
    frontier = np.array([i], dtype=np.int64)
    out = []
    found = 0
    while frontier.size and found < k:
        nbrs = np.unique(gather_rows(e.indptr, e.indices, frontier))
        nbrs = nbrs[~visited[nbrs]]
        visited[nbrs] = True
        out.append(nbrs[:k - found])
        found += min(nbrs.size, k - found)
        frontier = nbrs
    if not out:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(out)


@dataclass(frozen=True)
class DegreeStats:
    median_degree: float
    alpha: float


def degree_stats(e: EdgeSet) -> DegreeStats:
    """Median out-degree and continuous Hill power-law exponent (xmin = 1)."""
    if e.num_nodes == 0 or e.num_arcs == 0:
        raise EmptyInputError("degree statistics need a non-empty edge-set")
    deg = e.out_degrees()
    x = deg[deg >= 1].astype(float)
    log_sum = np.log(x).sum()
    alpha = 1.0 + x.size / log_sum if log_sum > 0 else float("inf")
    return DegreeStats(float(np.median(deg)), float(alpha))
