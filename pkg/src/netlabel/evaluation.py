"""Oracle evaluation on positive nodes, lift over global baselines, and sweeps."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .classifiers import (LEARNERS, LOCAL_METHODS, GAModel, MethodSpec, classify_local, ga_fit,
                          ga_split, ga_surrogate_precision)
from .errors import DensityTooLowError, InputError
from .graph import AttributedGraph, EdgeSet, LabelSet, bfs_order, neighborhood
from .models import build_model, spec_for_density
from .parallel import pmap
from .rng import uniform

DEFAULT_DENSITY_FACTORS = (0.125, 0.25, 0.5, 1.0, 2.0)
DEFAULT_BFS_SIZES = (1, 5, 10, 25, 45, 100, 200, 400)


@dataclass(frozen=True)
class OracleResult:
    labelset: str
    model: str
    method: str
    n_tested: int
    n_covered: int
    n_correct: int

    def __post_init__(self):
        if not 0 <= self.n_correct <= self.n_covered <= self.n_tested:
            raise InputError("need 0 <= n_correct <= n_covered <= n_tested")

    @property
    def precision(self) -> float | None:
        if self.n_covered == 0:
            return None
        return self.n_correct / self.n_covered

    @property
    def recall_coverage(self) -> float:
        return self.n_covered / self.n_tested


def lift(result: OracleResult, baseline) -> float:
    """Extra correct predictions over ``baseline``, per tested positive node.

    ``baseline`` is an :class:`OracleResult` on the same labelset, or a float
    precision of a baseline that covers every tested node.
    """
    if isinstance(baseline, OracleResult):
        if baseline.labelset != result.labelset or baseline.n_tested != result.n_tested:
            raise InputError("lift needs results on the same labelset")
        return (result.n_correct - baseline.n_correct) / result.n_tested
    return result.n_correct / result.n_tested - float(baseline)


# ---------------------------------------------------------------------------
# oracle runs


def _local_chunk(state, nodes):
    A, L, method, neighbors_of, key = state
    out = []
    for i in nodes:
        p = classify_local(method, neighbors_of(i), A, L, i, key=key)
        out.append(-1 if p.label is None else p.label)
    return np.array(out, dtype=np.int64)


def _split_work(nodes, workers, min_chunk=16):
    if workers <= 1:
        return [nodes]
    parts = max(1, min(workers * 4, math.ceil(nodes.size / min_chunk)))
    return [c for c in np.array_split(nodes, parts) if c.size]


def adjacency(e: EdgeSet) -> Callable:
    return lambda i: neighborhood(e, i)


def run_oracle(G: AttributedGraph, e_model: EdgeSet | None, method: MethodSpec, L: LabelSet,
               model_name: str = "model", *, neighbors_of: Callable | None = None,
               ga: GAModel | None = None, seed: int | None = None, workers: int = 1) -> OracleResult:
    """Test ``method`` on every positive node of ``L``; a prediction of 1 is correct.

    Local methods train on ``neighbors_of(i)`` (default: out-neighbors in
    ``e_model``). GA uses ``ga`` (fitted here when absent); GL draws at the
    labelset prevalence.
    """
    positives = L.positives()
    if positives.size == 0:
        raise InputError(f"labelset {L.name!r} has no positive node")
    seed = method.seed if seed is None else seed
    if method.method == "GL":
        draws = np.array([uniform(seed, "gl", L.name, int(i)) for i in positives])
        correct = int(np.sum(draws < L.prevalence))
        return OracleResult(L.name, model_name, "GL", positives.size, positives.size, correct)
    if method.method == "GA":
        if ga is None:
            ga = ga_fit(G.attributes, L, seed, bases=(method.params["base"],))
        pred = ga.predict_nodes(G.attributes, positives, method.params["base"])
        return OracleResult(L.name, model_name, method.name, positives.size, positives.size,
                            int(pred.sum()))
    if method.method not in LOCAL_METHODS:
        raise InputError(f"unknown method {method.method!r}")
    if neighbors_of is None:
        if e_model is None:
            raise InputError("a local method needs an edge-set or a neighbor function")
        neighbors_of = adjacency(e_model)
    state = (G.attributes, L, method, neighbors_of, (L.name, model_name))
    labels = np.concatenate(pmap(_local_chunk, _split_work(positives, workers), workers, state))
    covered = int(np.sum(labels >= 0))
    correct = int(np.sum(labels == 1))
    return OracleResult(L.name, model_name, method.name, positives.size, covered, correct)


# ---------------------------------------------------------------------------
# baselines shared by every table of a run


def _fit_ga_task(state, name):
    G, seed, half, params = state
    return ga_fit(G.attributes, G.labelsets[name], seed, bases=LEARNERS, params=params, half=half)


class Baselines:
    """GA models and GA/GL results per labelset, computed once per run.

    The node split is drawn once from ``seed`` and shared by every labelset and
    base learner.
    """

    def __init__(self, G: AttributedGraph, seed: int, params: Mapping[str, dict] | None = None):
        self.G = G
        self.seed = seed
        self.params = dict(params or {})
        self.half = ga_split(G.num_nodes, seed)
        self._ga = {}
        self._results = {}

    def prefetch(self, names: Sequence[str], workers: int = 1):
        todo = [n for n in names if n not in self._ga]
        models = pmap(_fit_ga_task, todo, workers, (self.G, self.seed, self.half, self.params))
        self._ga.update(zip(todo, models))

    def ga(self, name: str) -> GAModel:
        if name not in self._ga:
            self.prefetch([name])
        return self._ga[name]

    def result(self, name: str, method: str) -> OracleResult:
        """``method`` is ``"GA-RF"``, ``"GA-LR"``, ``"GA-NB"`` or ``"GL"``."""
        key = (name, method)
        if key not in self._results:
            L = self.G.labelsets[name]
            if method == "GL":
                spec = MethodSpec("GL", seed=self.seed)
                res = run_oracle(self.G, None, spec, L, "global")
            else:
                spec = MethodSpec("GA", {"base": method[3:]}, seed=self.seed)
                res = run_oracle(self.G, None, spec, L, "global", ga=self.ga(name))
            self._results[key] = res
        return self._results[key]

    def ga_rate(self, name: str, method: str) -> float:
        """Baseline precision that ``method`` is compared to under GA."""
        if method in LEARNERS:
            return self.result(name, "GA-" + method).precision
        return ga_surrogate_precision({b: self.result(name, "GA-" + b).precision for b in LEARNERS})

    def gl_rate(self, name: str) -> float:
        return self.result(name, "GL").precision


# ---------------------------------------------------------------------------
# lift tables


@dataclass(frozen=True)
class LiftCell:
    result: OracleResult
    lift_ga: float | None
    lift_gl: float | None


def _mean(values):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


@dataclass
class LiftTable:
    """Lift per (labelset, model, method) against the GA and GL baselines."""

    labelsets: list
    columns: list
    cells: dict = field(default_factory=dict)

    def cell(self, labelset, model, method) -> LiftCell:
        return self.cells[(labelset, model, method)]

    def values(self, baseline: str = "GA"):
        attr = "lift_ga" if baseline == "GA" else "lift_gl"
        return {k: getattr(c, attr) for k, c in self.cells.items()}

    def row_means(self, baseline: str = "GA") -> dict:
        vals = self.values(baseline)
        return {ls: _mean(vals[(ls, m, c)] for m, c in self.columns) for ls in self.labelsets}

    def column_means(self, baseline: str = "GA") -> dict:
        vals = self.values(baseline)
        return {(m, c): _mean(vals[(ls, m, c)] for ls in self.labelsets) for m, c in self.columns}

    def null_count(self) -> int:
        return sum(1 for c in self.cells.values() if c.lift_ga is None)

    def sorted_labelsets(self, baseline: str = "GA") -> list:
        """Labelsets by descending row mean; null rows last, names break ties."""
        means = self.row_means(baseline)
        return sorted(self.labelsets, key=lambda ls: (means[ls] is None, -(means[ls] or 0.0), ls))


def lift_cell(result: OracleResult, baselines: Baselines, method: str) -> LiftCell:
    if result.precision is None:
        return LiftCell(result, None, None)
    return LiftCell(result, lift(result, baselines.ga_rate(result.labelset, method)),
                    lift(result, baselines.result(result.labelset, "GL")))


def lift_heatmap(G: AttributedGraph, models: Mapping[str, EdgeSet], methods: Sequence[MethodSpec],
                 labelsets: Sequence[str], baselines: Baselines, workers: int = 1) -> LiftTable:
    """Every (model, method) on every labelset, with lift cells against GA and GL."""
    if not models or not methods or not labelsets:
        raise InputError("need at least one model, method and labelset")
    baselines.prefetch(labelsets, workers)
    table = LiftTable(list(labelsets), [(m, s.name) for m in models for s in methods])
    for name in labelsets:
        L = G.labelsets[name]
        for model_name, e in models.items():
            for spec in methods:
                res = run_oracle(G, e, spec, L, model_name, workers=workers)
                table.cells[(name, model_name, spec.name)] = lift_cell(res, baselines, spec.method)
    return table


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepSeries:
    kind: str
    x: list
    lift: dict = field(default_factory=dict)
    coverage: list | None = None
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        for series in self.lift.values():
            if len(series) != len(self.x):
                raise InputError("series length must match x values")


def density_sweep(G: AttributedGraph, model_kind: str, methods: Sequence[MethodSpec],
                  labelsets: Sequence[str], factors: Sequence[float], baselines: Baselines,
                  similarity: str = "intersection", knn_budget: str = "arcs",
                  model_name: str | None = None, workers: int = 1) -> SweepSeries:
    """Rebuild the model at each density factor; mean GA lift and coverage per point.

    A factor whose budget is too low yields ``None`` at that point.
    """
    if any(not f > 0 for f in factors):
        raise InputError("density factors must be positive")
    model_name = model_name or ("KNN" if model_kind == "knn" else "TH")
    baselines.prefetch(labelsets, workers)
    series = {s.name: [] for s in methods}
    coverage = []
    ks = {}
    for f in factors:
        try:
            spec = spec_for_density(G.edges, model_kind, f, similarity, knn_budget)
        except DensityTooLowError:
            for s in methods:
                series[s.name].append(None)
            coverage.append(None)
            continue
        if model_kind == "knn":
            ks[f] = spec.k(G.num_nodes)
        e = build_model(G.attributes, spec, workers=workers)
        covs = []
        for s in methods:
            lifts = []
            for name in labelsets:
                res = run_oracle(G, e, s, G.labelsets[name], model_name, workers=workers)
                lifts.append(lift_cell(res, baselines, s.method).lift_ga)
                covs.append(res.recall_coverage)
            series[s.name].append(_mean(lifts))
        coverage.append(_mean(covs))
    return SweepSeries("density", list(factors), series, coverage, {"k": ks})


def _bfs_orders(state, nodes):
    e, size = state
    return [bfs_order(e, int(i), size) for i in nodes]


def bfs_sweep(G: AttributedGraph, e: EdgeSet, methods: Sequence[MethodSpec],
              labelsets: Sequence[str], sizes: Sequence[int], baselines: Baselines,
              model_name: str = "Social", workers: int = 1) -> SweepSeries:
    """Mean GA lift when each node trains on its first ``s`` BFS-encountered nodes."""
    if any(int(s) < 1 for s in sizes):
        raise InputError("BFS sizes must be >= 1")
    baselines.prefetch(labelsets, workers)
    biggest = max(int(s) for s in sizes)
    nodes = np.unique(np.concatenate([G.labelsets[n].positives() for n in labelsets]))
    orders = {}
    for chunk, result in zip(_split_work(nodes, workers),
                             pmap(_bfs_orders, _split_work(nodes, workers), workers, (e, biggest))):
        orders.update(zip(chunk.tolist(), result))
    series = {s.name: [] for s in methods}
    for size in sizes:
        size = int(size)

        def neighbors_of(i, size=size):
            return orders[int(i)][:size]

        for s in methods:
            lifts = []
            for name in labelsets:
                res = run_oracle(G, None, s, G.labelsets[name], f"{model_name}-bfs{size}",
                                 neighbors_of=neighbors_of, workers=workers)
                lifts.append(lift_cell(res, baselines, s.method).lift_ga)
            series[s.name].append(_mean(lifts))
    return SweepSeries("bfs-size", [int(s) for s in sizes], series)


# ---------------------------------------------------------------------------
# labelset quality


@dataclass(frozen=True)
class Regression:
    slope: float | None
    intercept: float | None
    r: float | None
    n: int


def _flat(v: np.ndarray) -> bool:
    return float(np.ptp(v)) <= 1e-12 * max(1.0, float(np.abs(v).max()))


def bias_lift_regression(bias: Mapping[str, float | None], lifts: Mapping[str, float | None]) -> Regression:
    """Least-squares line of bias (y) on lift (x) over labelsets, plus Pearson r."""
    names = [n for n in bias if n in lifts and bias[n] is not None and lifts[n] is not None]
    if len(names) < 3:
        raise InputError("regression needs at least 3 labelsets with defined values")
    x = np.array([lifts[n] for n in names], dtype=float)
    y = np.array([bias[n] for n in names], dtype=float)
    if _flat(x):
        return Regression(None, None, None, len(names))
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy, sxy = float(dx @ dx), float(dy @ dy), float(dx @ dy)
    if _flat(y):
        # rounding noise in the mean would otherwise give r around 1e-16
        return Regression(0.0, float(y[0]), None, len(names))
    slope = sxy / sxx
    intercept = float(y.mean() - slope * x.mean())
    r = sxy / math.sqrt(sxx * syy)
    return Regression(slope, intercept, r, len(names))
