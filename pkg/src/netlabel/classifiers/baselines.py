"""Global baselines: split-half global attribute models (GA) and label-prior sampling (GL)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from ..errors import InputError
from ..graph import LabelSet
from ..rng import substream, uniform
from .local import DEFAULT_PARAMS, LEARNERS, Prediction, make_learner


def ga_split(num_nodes: int, seed: int) -> np.ndarray:
    """Seeded even split: ``half[i]`` is 0 or 1, half sizes differ by at most one."""
    if num_nodes < 4:
        raise InputError("the global split needs at least 2 nodes per half")
    perm = substream(seed, "ga-split").permutation(num_nodes)
    half = np.ones(num_nodes, dtype=np.int8)
    half[perm[: num_nodes // 2]] = 0
    return half


class _Constant:
    def __init__(self, label):
        self.label = int(label)

    def predict(self, X):
        return np.full(np.atleast_2d(X).shape[0], self.label, dtype=np.int64)


@dataclass
class GAModel:
    """One trained model per (base learner, half), plus the split and shared dimensions."""

    labelset: str
    half: np.ndarray
    dims: np.ndarray
    models: dict = field(default_factory=dict)

    def bases(self):
        return sorted({b for b, _ in self.models})

    def predict_nodes(self, A, nodes, base: str) -> np.ndarray:
        """Predictions for ``nodes``, each from the model trained on the other half."""
        if base not in LEARNERS:
            raise InputError(f"unknown GA base {base!r}")
        A = sp.csr_matrix(A)
        nodes = np.asarray(nodes, dtype=np.int64)
        out = np.zeros(nodes.size, dtype=np.int64)
        for h in (0, 1):
            mask = self.half[nodes] == h
            if mask.any():
                X = A[nodes[mask]][:, self.dims].toarray().astype(float)
                out[mask] = self.models[(base, 1 - h)].predict(X)
        return out


def ga_fit(A, L: LabelSet, seed: int, bases=LEARNERS, params: Mapping[str, dict] | None = None,
           half: np.ndarray | None = None) -> GAModel:
    """Train every base learner once on each half of the nodes.

    Columns are the dimensions present anywhere in ``A``. A half whose labels
    are all equal gets a constant model.
    """
    A = sp.csr_matrix(A)
    n = A.shape[0]
    if half is None:
        half = ga_split(n, seed)
    dims = np.unique(A.indices)
    ga = GAModel(L.name, half, dims)
    for h in (0, 1):
        rows = np.flatnonzero(half == h)
        if rows.size < 2:
            raise InputError("the global split needs at least 2 nodes per half")
        X = A[rows][:, dims].toarray().astype(float)
        y = L.labels[rows].astype(np.int64)
        for base in bases:
            if y.min() == y.max():
                ga.models[(base, h)] = _Constant(y[0])
                continue
            p = dict(DEFAULT_PARAMS[base])
            p.update((params or {}).get(base, {}))
            rng = substream(seed, "ga", L.name, base, h)
            ga.models[(base, h)] = make_learner(base, p).fit(X, y, rng)
    return ga


def ga_predict(ga: GAModel, i: int, a_i, base: str) -> Prediction:
    """Predict node ``i`` (dense row ``a_i`` over ``ga.dims``) with the opposite half's model."""
    if not 0 <= int(i) < ga.half.size:
        raise InputError(f"node {i} is not covered by the split")
    model = ga.models[(base, 1 - int(ga.half[i]))]
    x = np.asarray(a_i, dtype=float).reshape(1, -1)
    return Prediction(int(i), int(model.predict(x)[0]), "GA-" + base)


def ga_surrogate_precision(ga_precisions: Mapping[str, float]) -> float:
    """Mean precision of the available GA learners (baseline for CS and NL)."""
    values = [v for v in ga_precisions.values() if v is not None]
    if not values:
        raise InputError("no GA precision available")
    return float(np.mean(values))


def gl_predict(L: LabelSet, i: int, seed: int) -> Prediction:
    """Bernoulli draw at the labelset prevalence, keyed by ``(seed, labelset, i)``."""
    if not 0 <= int(i) < len(L):
        raise InputError(f"node {i} out of range")
    label = int(uniform(seed, "gl", L.name, int(i)) < L.prevalence)
    return Prediction(int(i), label, "GL")

