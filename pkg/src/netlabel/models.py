"""Similarity-inferred network models: per-node KNN and global threshold."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DensityTooLowError, InputError
from .graph import EdgeSet
from .rng import substream
from .similarity import SIMILARITIES, topk_global, topk_per_node

MODEL_KINDS = ("knn", "threshold")
KNN_BUDGETS = ("arcs", "pairs")


@dataclass(frozen=True)
class ModelSpec:
    """A network model at target edge count ``lam``.

    For ``knn`` the budget counts directed arcs, for ``threshold`` unordered pairs.
    """

    model: str
    similarity: str = "intersection"
    lam: int = 1
    density_factor: float | None = None

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise InputError(f"unknown model {self.model!r}; expected one of {MODEL_KINDS}")
        if self.similarity not in SIMILARITIES:
            raise InputError(f"unknown similarity {self.similarity!r}")
        if int(self.lam) < 1:
            raise DensityTooLowError(f"lambda must be >= 1, got {self.lam}")
        object.__setattr__(self, "lam", int(self.lam))

    def k(self, num_nodes: int) -> int:
        return self.lam // num_nodes

    @property
    def name(self) -> str:
        return "KNN" if self.model == "knn" else "TH"


def build_knn(A, spec: ModelSpec, workers: int = 1) -> EdgeSet:
    """Directed edges from every node to its top ``lam // n`` positive-similarity peers."""
    if spec.model != "knn":
        raise InputError("build_knn needs a knn ModelSpec")
    n = A.shape[0]
    k = spec.k(n)
    if k < 1:
        raise DensityTooLowError(f"lambda={spec.lam} gives k=0 on {n} nodes")
    pairs = topk_per_node(A, spec.similarity, k, workers=workers)
    return EdgeSet.from_arcs(n, pairs.i, pairs.j, provenance="knn")


def build_threshold(A, spec: ModelSpec, workers: int = 1) -> EdgeSet:
    """The globally top ``lam`` pairs, stored as symmetric arcs."""
    if spec.model != "threshold":
        raise InputError("build_threshold needs a threshold ModelSpec")
    n = A.shape[0]
    pairs = topk_global(A, spec.similarity, spec.lam, workers=workers)
    return EdgeSet.from_pairs(n, np.column_stack([pairs.i, pairs.j]), provenance="threshold")


def build_model(A, spec: ModelSpec, workers: int = 1) -> EdgeSet:
    if spec.model == "knn":
        return build_knn(A, spec, workers=workers)
    return build_threshold(A, spec, workers=workers)


def match_density(e_obs: EdgeSet, factor: float, model: str = "threshold",
                  knn_budget: str = "arcs") -> int:
    """Edge budget ``lam`` for ``model`` at ``factor`` times the observed density.

    Threshold budgets count unordered pairs. KNN budgets count directed arcs;
    with ``knn_budget="pairs"`` the observed pair count is used instead.
    """
    if not factor > 0:
        raise InputError("density factor must be positive")
    if model not in MODEL_KINDS:
        raise InputError(f"unknown model {model!r}")
    if knn_budget not in KNN_BUDGETS:
        raise InputError(f"unknown knn budget convention {knn_budget!r}")
    pairs = e_obs.num_pairs()
    if model == "threshold" or knn_budget == "pairs":
        lam = int(round(factor * pairs))
    else:
        lam = int(round(factor * e_obs.num_arcs))
    if lam < 1:
        raise DensityTooLowError(f"factor {factor} gives lambda={lam}")
    if model == "knn" and lam // e_obs.num_nodes < 1:
        raise DensityTooLowError(f"factor {factor} gives k=0 on {e_obs.num_nodes} nodes")
    return lam


def spec_for_density(e_obs: EdgeSet, model: str, factor: float, similarity: str = "intersection",
                     knn_budget: str = "arcs") -> ModelSpec:
    lam = match_density(e_obs, factor, model=model, knn_budget=knn_budget)
    return ModelSpec(model, similarity, lam, density_factor=factor)


def random_edges(num_nodes: int, num_pairs: int, seed: int) -> EdgeSet:
    """Uniformly random undirected graph with exactly ``num_pairs`` distinct pairs.

    A null model that keeps the density of a reference graph but none of its
    structure.
    """
    n = int(num_nodes)
    max_pairs = n * (n - 1) // 2
    if not 0 <= num_pairs <= max_pairs:
        raise InputError(f"cannot place {num_pairs} pairs on {n} nodes")
    rng = substream(seed, "random-graph")
    chosen = np.empty(0, dtype=np.int64)
    while chosen.size < num_pairs:
        batch = 2 * (num_pairs - chosen.size) + 64
        u, v = rng.integers(0, n, batch), rng.integers(0, n, batch)
        ok = u != v
        keys = np.minimum(u, v)[ok] * n + np.maximum(u, v)[ok]
        merged = np.concatenate([chosen, keys])
        _, first = np.unique(merged, return_index=True)
        chosen = merged[np.sort(first)][:num_pairs]
    return EdgeSet.from_pairs(n, np.column_stack([chosen // n, chosen % n]), "random")
