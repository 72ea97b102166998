"""Per-node classification from neighborhood training data."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..errors import InputError
from ..graph import LabelSet
from ..rng import substream
from ..similarity import COSINE_DECIMALS, SIMILARITIES
from .bayes import MultinomialNB
from .forest import RandomForest, majority
from .linear import LinearRegressionClassifier

LOCAL_METHODS = ("RF", "LR", "NB", "CS", "NL")
LEARNERS = ("RF", "LR", "NB")
ALL_METHODS = LOCAL_METHODS + ("GA", "GL")

DEFAULT_PARAMS = {
    "RF": {"n_trees": 50, "max_depth": 8, "min_rows": 5},
    "LR": {"ridge": 1e-3, "threshold": 0.5},
    "NB": {"alpha": 1.0},
    "CS": {"similarity": "cosine"},
    "NL": {},
    "GA": {"base": "RF"},
    "GL": {},
}

# Called as hook(node, training_rows) before every local fit; used by tests to
# check that a node never trains on itself.
training_hook = None


@dataclass(frozen=True)
class MethodSpec:
    method: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def name(self) -> str:
        if self.method == "GA":
            return "GA-" + self.params["base"]
        return self.method

    def __post_init__(self):
        if self.method not in ALL_METHODS:
            raise InputError(f"unknown method {self.method!r}; expected one of {ALL_METHODS}")
        merged = dict(DEFAULT_PARAMS[self.method])
        unknown = set(self.params) - set(merged)
        if unknown:
            raise InputError(f"{self.method}: unknown hyperparameters {sorted(unknown)}")
        merged.update(self.params)
        _validate(self.method, merged)
        object.__setattr__(self, "params", merged)


def _validate(method, p):
    if method == "RF":
        if p["n_trees"] < 1 or p["max_depth"] < 1 or p["min_rows"] < 1:
            raise InputError("RF: n_trees, max_depth and min_rows must be >= 1")
    elif method == "LR":
        if p["ridge"] < 0:
            raise InputError("LR: ridge must be non-negative")
    elif method == "NB":
        if p["alpha"] <= 0:
            raise InputError("NB: alpha must be positive")
    elif method == "CS":
        if p["similarity"] not in SIMILARITIES:
            raise InputError(f"CS: unknown similarity {p['similarity']!r}")
    elif method == "GA":
        if p["base"] not in LEARNERS:
            raise InputError(f"GA: base must be one of {LEARNERS}")


@dataclass(frozen=True)
class Prediction:
    node: int
    label: int | None
    method: str
    reason: str | None = None

    @property
    def abstained(self) -> bool:
        return self.label is None


def make_learner(method: str, params: dict):
    if method == "RF":
        return RandomForest(params["n_trees"], params["max_depth"], params["min_rows"])
    if method == "LR":
        return LinearRegressionClassifier(params["ridge"], params["threshold"])
    if method == "NB":
        return MultinomialNB(params["alpha"])
    raise InputError(f"{method} is not a trainable learner")


def active_block(A: sp.csr_matrix, rows, test_row: int | None = None):
    """Dense ``(X, x)`` over the union of dimensions present in ``rows`` and the test row."""
    rows = np.asarray(rows, dtype=np.int64)
    stacked = rows if test_row is None else np.append(rows, test_row)
    sub = A[stacked]
    dims = np.unique(sub.indices)
    dense = sub[:, dims].toarray().astype(float)
    if test_row is None:
        return dense, None
    return dense[:-1], dense[-1:]


def max_median_label(sims, labels) -> int:
    """Label whose neighbors have the largest lower-median similarity; ties go to 0."""
    best_label, best = None, None
    for lab in np.unique(labels):
        vals = np.sort(np.asarray(sims)[labels == lab])
        med = vals[(vals.size - 1) // 2]
        if best is None or med > best:
            best_label, best = int(lab), med
    return best_label


def classify_local(method: MethodSpec, neighbors, A, L: LabelSet, i: int, key=()) -> Prediction:
    """Train ``method`` on the neighbors' rows and labels, then predict node ``i``.

    Abstains when ``neighbors`` is empty. A neighborhood with a single label
    predicts that label without training. ``key`` extends the random
    substream (for example with labelset and model names).
    """
    A = sp.csr_matrix(A)
    n = A.shape[0]
    if not 0 <= int(i) < n:
        raise InputError(f"node id {i} out of range [0, {n})")
    if method.method not in LOCAL_METHODS:
        raise InputError(f"{method.method} is not a local method")
    neighbors = np.asarray(neighbors, dtype=np.int64)
    if np.any(neighbors == i):
        raise InputError(f"node {i} appears in its own training data")
    if neighbors.size == 0:
        return Prediction(int(i), None, method.method, "empty-neighborhood")
    if training_hook is not None:
        training_hook(int(i), neighbors)
    y = L.labels[neighbors].astype(np.int64)
    if method.method == "NL":
        return Prediction(int(i), majority(y), "NL")
    if y.min() == y.max():
        return Prediction(int(i), int(y[0]), method.method, "single-class")
    X, x = active_block(A, neighbors, i)
    if method.method == "CS":
        sims = block_similarity(X, x[0], method.params["similarity"])
        return Prediction(int(i), max_median_label(sims, y), "CS")
    rng = substream(method.seed, "local", method.method, *key, int(i))
    model = make_learner(method.method, method.params).fit(X, y, rng)
    return Prediction(int(i), int(model.predict(x)[0]), method.method)


def block_similarity(X, x, similarity: str) -> np.ndarray:
    """Similarity of each dense row of ``X`` to ``x``; same values as the pairwise functions."""
    if similarity == "intersection":
        return np.minimum(X, x).sum(axis=1)
    if similarity != "cosine":
        raise InputError(f"unknown similarity {similarity!r}")
    norms = np.linalg.norm(X, axis=1) * np.linalg.norm(x)
    dots = X @ x
    cos = np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0)
    return np.round(np.clip(cos, 0.0, 1.0), COSINE_DECIMALS)
