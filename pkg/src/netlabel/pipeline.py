"""Experiment steps shared by the CLI commands.

Each step returns ``(header, rows)`` ready for :func:`netlabel.io.write_csv`;
:func:`reproduce` runs all of them and writes one CSV per table.
"""
from __future__ import annotations

import logging
from pathlib import Path

from . import __version__
from .bias import bias_reports, delta_bias
from .config import RunConfig
from .errors import ConfigError, NetlabelError
from .evaluation import Baselines, bfs_sweep, bias_lift_regression, density_sweep, lift_heatmap
from .graph import AttributedGraph
from .io import file_hash, parse_graph, read_graph, write_csv, write_report
from .models import ModelSpec, build_model, match_density, random_edges
from .synth import SynthConfig, generate_synthetic

log = logging.getLogger(__name__)

BIAS_HEADER = ["labelset", "prevalence", "bias", "n_evaluated", "n_positive"]
LIFT_HEADER = ["labelset", "model", "method", "n_tested", "n_covered", "n_correct", "precision",
               "lift_ga", "lift_gl"]


def load_graph(graph: dict, seed: int) -> AttributedGraph:
    if "synth" in graph:
        d = dict(graph["synth"])
        d.setdefault("seed", seed)
        G, _ = generate_synthetic(SynthConfig.from_dict(d))
        return G
    if "dir" in graph:
        return read_graph(graph["dir"])
    return parse_graph(graph["edges"], graph["attributes"], graph.get("labels"))


class Run:
    """A loaded graph plus lazily built edge-sets and baselines for one config."""

    def __init__(self, cfg: RunConfig, workers: int = 1, graph: AttributedGraph | None = None):
        self.cfg = cfg
        self.workers = workers
        self.G = graph if graph is not None else load_graph(cfg.graph, cfg.seed)
        names = cfg.labelsets if cfg.labelsets is not None else sorted(self.G.labelsets)
        if not names:
            raise ConfigError("no labelset selected")
        missing = [n for n in names if n not in self.G.labelsets]
        if missing:
            raise ConfigError(f"unknown labelsets {missing}")
        self.labelsets = list(names)
        self.baselines = Baselines(self.G, cfg.seed, cfg.ga_params)
        self._edges = {}

    # edge-sets -----------------------------------------------------------

    def model_names(self) -> list:
        names = [self.cfg.observed_name] if self.cfg.observed_name else []
        names += list(self.cfg.models)
        if self.cfg.random_name:
            names.append(self.cfg.random_name)
        return names

    def edges(self, name: str):
        if name in self._edges:
            return self._edges[name]
        cfg = self.cfg
        if name == cfg.observed_name:
            e = self.G.edges
        elif name == cfg.random_name:
            e = random_edges(self.G.num_nodes, self.G.edges.num_pairs(), cfg.seed)
        elif name in cfg.models:
            m = cfg.models[name]
            factor = m.get("density_factor", 1.0)
            lam = match_density(self.G.edges, factor, m["model"], cfg.knn_budget)
            spec = ModelSpec(m["model"], m.get("similarity", "intersection"), lam, factor)
            e = build_model(self.G.attributes, spec, workers=self.workers)
        else:
            raise ConfigError(f"unknown edge-set {name!r}; known: {self.model_names()}")
        self._edges[name] = e
        return e

    # steps -----------------------------------------------------------------

    def bias_table(self, edge_name: str):
        reports = bias_reports(self.edges(edge_name), [self.G.labelsets[n] for n in self.labelsets])
        rows = [[r.labelset, r.prevalence, r.bias, r.n_evaluated, r.n_positive]
                for r in (reports[n] for n in sorted(reports))]
        return BIAS_HEADER, rows, reports

    def bias_by_model(self):
        """Bias on every edge-set, with the change from the observed graph."""
        base_name = self.cfg.observed_name or self.model_names()[0]
        _, _, base = self.bias_table(base_name)
        rows, summaries = [], []
        for name in self.model_names():
            _, _, other = self.bias_table(name)
            summary = delta_bias(base, other, base_name, name)
            summaries.append(summary)
            for ls in sorted(other):
                r = other[ls]
                rows.append([ls, name, r.prevalence, r.bias, r.n_evaluated, summary.deltas.get(ls)])
        header = ["labelset", "edges", "prevalence", "bias", "n_evaluated", "delta_bias"]
        delta_rows = [[s.source, s.target, s.mu, s.sigma, len(s.deltas)] for s in summaries]
        return (header, rows), (["source", "target", "mu", "sigma", "n_labelsets"], delta_rows)

    def heatmap(self):
        models = {name: self.edges(name) for name in self.model_names()}
        table = lift_heatmap(self.G, models, self.cfg.method_specs(self.cfg.methods), self.labelsets,
                             self.baselines, self.workers)
        rows = []
        for ls in table.sorted_labelsets():
            for model, method in table.columns:
                c = table.cell(ls, model, method)
                r = c.result
                rows.append([ls, model, method, r.n_tested, r.n_covered, r.n_correct, r.precision,
                             c.lift_ga, c.lift_gl])
        gl, ga = table.column_means("GL"), table.column_means("GA")
        means = [[m, s, ga[(m, s)], gl[(m, s)]] for m, s in table.columns]
        return table, (LIFT_HEADER, rows), (["model", "method", "mean_lift_ga", "mean_lift_gl"], means)

    def density(self):
        specs = self.cfg.method_specs(self.cfg.density_methods or self.cfg.methods)
        rows = []
        for kind in self.cfg.density_models:
            s = density_sweep(self.G, kind, specs, self.labelsets, self.cfg.density_factors,
                              self.baselines, knn_budget=self.cfg.knn_budget, workers=self.workers)
            model = "KNN" if kind == "knn" else "TH"
            for spec in specs:
                for k, x in enumerate(s.x):
                    rows.append([model, spec.name, x, s.labels["k"].get(x), s.lift[spec.name][k],
                                 s.coverage[k]])
        return ["model", "method", "factor", "k", "mean_lift_ga", "coverage"], rows

    def bfs(self):
        name = self.cfg.bfs_edges or self.cfg.observed_name
        if name is None:
            raise ConfigError("bfs_edges is required when the observed graph is disabled")
        specs = self.cfg.method_specs(self.cfg.bfs_methods)
        s = bfs_sweep(self.G, self.edges(name), specs, self.labelsets, self.cfg.bfs_sizes,
                      self.baselines, model_name=name, workers=self.workers)
        rows = [[name, spec.name, x, s.lift[spec.name][k]] for spec in specs for k, x in enumerate(s.x)]
        return ["edges", "method", "size", "mean_lift_ga"], rows

    def bias_lift(self, table=None):
        """Per-labelset lift of one model-method pair against bias and prevalence, with fits."""
        bl = self.cfg.bias_lift
        model, method = bl["model"], bl["method"]
        if table is None or (model, method) not in table.columns:
            spec = self.cfg.method_specs([method])
            table = lift_heatmap(self.G, {model: self.edges(model)}, spec, self.labelsets,
                                 self.baselines, self.workers)
            method = spec[0].name
        _, _, reports = self.bias_table(bl["bias_edges"])
        lifts = {ls: table.cell(ls, model, method).lift_ga for ls in self.labelsets}
        bias = {ls: reports[ls].bias for ls in self.labelsets}
        prevalence = {ls: reports[ls].prevalence for ls in self.labelsets}
        points = [[ls, prevalence[ls], bias[ls], lifts[ls]] for ls in self.labelsets]
        fits = []
        for y_name, y in (("bias", bias), ("prevalence", prevalence)):
            try:
                reg = bias_lift_regression(y, lifts)
                fits.append([f"{model}-{method}", y_name, reg.slope, reg.intercept, reg.r, reg.n])
            except NetlabelError as exc:
                log.warning("no %s fit: %s", y_name, exc)
                fits.append([f"{model}-{method}", y_name, None, None, None, 0])
        return ((["labelset", "prevalence", "bias", "lift_ga"], points),
                (["pair", "y", "slope", "intercept", "r", "n"], fits))


def _write(out: Path, name: str, table, written: dict):
    header, rows = table
    path = out / name
    write_csv(path, header, rows)
    written[name] = file_hash(path)


def reproduce(cfg: RunConfig, out, workers: int = 1) -> dict:
    """Run every step and write one CSV per table plus ``manifest.json``.

    A failing step aborts the run; the manifest then names it and marks the
    bundle as partial.
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    written, step = {}, "load"
    config = cfg.to_dict()
    manifest = {"version": __version__}
    try:
        run = Run(cfg, workers)
        step = "bias"
        if cfg.observed_name:
            header, rows, _ = run.bias_table(cfg.observed_name)
            _write(out, "fig1_bias_observed.csv", (header, rows), written)
        by_model, deltas = run.bias_by_model()
        _write(out, "fig2_bias_by_edges.csv", by_model, written)
        _write(out, "table2_delta_bias.csv", deltas, written)
        step = "lift"
        table, cells, means = run.heatmap()
        _write(out, "fig3_lift_heatmap.csv", cells, written)
        _write(out, "table3_mean_lift.csv", means, written)
        step = "density-sweep"
        _write(out, "fig4_density_sweep.csv", run.density(), written)
        step = "bfs-sweep"
        _write(out, "fig5_bfs_sweep.csv", run.bfs(), written)
        step = "bias-lift"
        points, fits = run.bias_lift(table)
        _write(out, "fig6_fig7_lift_points.csv", points, written)
        _write(out, "fig6_fig7_fits.csv", fits, written)
    except NetlabelError as exc:
        manifest.update(status="partial", failed_step=step, error=str(exc), files=written)
        write_report(manifest, out / "manifest.json", config, cfg.seed)
        raise
    manifest.update(status="complete", files=written)
    return write_report(manifest, out / "manifest.json", config, cfg.seed)
