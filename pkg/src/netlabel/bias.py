"""Network-label bias of labelsets on an edge-set, and its change between edge-sets."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import InputError, UndefinedBiasError
from .graph import EdgeSet, LabelSet


@dataclass(frozen=True)
class BiasReport:
    labelset: str
    prevalence: float
    bias: float | None
    n_evaluated: int
    n_positive: int = 0


@dataclass(frozen=True)
class DeltaBiasSummary:
    source: str
    target: str
    deltas: dict
    mu: float
    sigma: float


def lower_median(values) -> float:
    values = np.sort(np.asarray(values, dtype=float))
    return float(values[(values.size - 1) // 2])


def neighbor_positive_fraction(e: EdgeSet, labels: np.ndarray):
    """Per node: fraction of out-neighbors labeled 1 (nan when isolated) and out-degree."""
    deg = e.out_degrees()
    src = np.repeat(np.arange(e.num_nodes), deg)
    counts = np.bincount(src, weights=labels[e.indices], minlength=e.num_nodes)
    frac = np.divide(counts, deg, out=np.full(e.num_nodes, np.nan), where=deg > 0)
    return frac, deg


def network_label_bias(e: EdgeSet, L: LabelSet) -> BiasReport:
    """Median over positive nodes of (neighbor positive rate - prevalence).

    Positive nodes without out-neighbors are skipped; even counts take the
    lower of the two middle values.
    """
    if len(L) != e.num_nodes:
        raise InputError(f"labelset {L.name!r} does not match the edge-set size")
    positives = L.positives()
    if positives.size == 0:
        raise UndefinedBiasError(f"labelset {L.name!r} has no positive node")
    frac, deg = neighbor_positive_fraction(e, L.labels)
    evaluated = positives[deg[positives] > 0]
    if evaluated.size == 0:
        raise UndefinedBiasError(f"every positive node of {L.name!r} is isolated")
    bias = lower_median(frac[evaluated]) - L.prevalence
    return BiasReport(L.name, L.prevalence, bias, int(evaluated.size), int(positives.size))


def bias_reports(e: EdgeSet, labelsets: Iterable[LabelSet]) -> dict:
    """Bias per labelset; undefined values become reports with ``bias=None``."""
    out = {}
    for L in labelsets:
        try:
            out[L.name] = network_label_bias(e, L)
        except UndefinedBiasError:
            out[L.name] = BiasReport(L.name, L.prevalence, None, 0, L.num_positive)
    return out


def delta_bias(base: Mapping[str, BiasReport], other: Mapping[str, BiasReport],
               source: str = "base", target: str = "other") -> DeltaBiasSummary:
    """Per-labelset ``other.bias - base.bias`` with mean and population std.

    Labelsets whose bias is undefined on either side are left out.
    """
    shared = [name for name in base if name in other]
    if not shared:
        raise InputError("the two bias reports share no labelset")
    deltas = {}
    for name in shared:
        b, o = base[name].bias, other[name].bias
        if b is not None and o is not None:
            deltas[name] = o - b
    if not deltas:
        raise InputError("no shared labelset has a defined bias on both edge-sets")
    values = np.array(list(deltas.values()))
    return DeltaBiasSummary(source, target, deltas, float(values.mean()), float(values.std()))
