"""Run configuration files (JSON) for the experiment commands."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .classifiers import LEARNERS, LOCAL_METHODS, MethodSpec
from .errors import ConfigError, InputError
from .evaluation import DEFAULT_BFS_SIZES, DEFAULT_DENSITY_FACTORS
from .models import KNN_BUDGETS, MODEL_KINDS
from .similarity import SIMILARITIES

SCHEMA_VERSION = 1
DEFAULT_MODELS = {
    "KNN": {"model": "knn", "similarity": "intersection", "density_factor": 1.0},
    "TH": {"model": "threshold", "similarity": "intersection", "density_factor": 1.0},
}
DEFAULT_BIAS_LIFT = {"model": "KNN", "method": "RF", "bias_edges": "KNN"}


@dataclass
class RunConfig:
    """Everything an experiment command needs, minus the worker count.

    ``graph`` holds either ``{"dir": path}``, explicit ``edges``/``attributes``/
    ``labels`` paths, or ``{"synth": {...}}`` generator settings.
    """

    seed: int
    graph: dict
    labelsets: list | None = None
    models: dict = field(default_factory=lambda: {k: dict(v) for k, v in DEFAULT_MODELS.items()})
    observed_name: str | None = "Social"
    random_name: str | None = "Random"
    methods: list = field(default_factory=lambda: list(LOCAL_METHODS))
    knn_budget: str = "arcs"
    ga_params: dict = field(default_factory=dict)
    density_models: list = field(default_factory=lambda: list(MODEL_KINDS))
    density_factors: list = field(default_factory=lambda: list(DEFAULT_DENSITY_FACTORS))
    density_methods: list | None = None
    bfs_sizes: list = field(default_factory=lambda: list(DEFAULT_BFS_SIZES))
    bfs_methods: list = field(default_factory=lambda: list(LEARNERS))
    bfs_edges: str | None = None
    bias_lift: dict = field(default_factory=lambda: dict(DEFAULT_BIAS_LIFT))
    schema_version: int = SCHEMA_VERSION

    def validate(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported config schema_version {self.schema_version}")
        self._validate_graph()
        if self.labelsets is not None and (not isinstance(self.labelsets, list) or not self.labelsets):
            raise ConfigError("labelsets must be a non-empty list (or null for all)")
        if not isinstance(self.models, dict):
            raise ConfigError("models must map names to model settings")
        for name, m in self.models.items():
            if m.get("model") not in MODEL_KINDS:
                raise ConfigError(f"model {name!r}: 'model' must be one of {MODEL_KINDS}")
            if m.get("similarity", "intersection") not in SIMILARITIES:
                raise ConfigError(f"model {name!r}: unknown similarity {m.get('similarity')!r}")
            if not _positive(m.get("density_factor", 1.0)):
                raise ConfigError(f"model {name!r}: density_factor must be positive")
        names = list(self.models) + [n for n in (self.observed_name, self.random_name) if n]
        if len(set(names)) != len(names):
            raise ConfigError("model names must be unique")
        if self.knn_budget not in KNN_BUDGETS:
            raise ConfigError(f"knn_budget must be one of {KNN_BUDGETS}")
        for key in ("methods", "bfs_methods"):
            if not getattr(self, key):
                raise ConfigError(f"{key} must not be empty")
        try:
            for spec in self.method_specs(self.methods) + self.method_specs(self.bfs_methods):
                if spec.method not in LOCAL_METHODS:
                    raise ConfigError(f"{spec.method} is a baseline, not a local method")
            self.method_specs(self.density_methods or self.methods)
        except InputError as exc:
            raise ConfigError(str(exc)) from None
        if any(m not in MODEL_KINDS for m in self.density_models):
            raise ConfigError(f"density_models must be drawn from {MODEL_KINDS}")
        if not self.density_factors or any(not _positive(f) for f in self.density_factors):
            raise ConfigError("density_factors must be positive numbers")
        if not self.bfs_sizes or any(not isinstance(s, int) or s < 1 for s in self.bfs_sizes):
            raise ConfigError("bfs_sizes must be integers >= 1")
        for key in ("model", "method", "bias_edges"):
            if key not in self.bias_lift:
                raise ConfigError(f"bias_lift needs {key!r}")
        return self

    def _validate_graph(self):
        g = self.graph
        if not isinstance(g, dict):
            raise ConfigError("graph must be an object")
        if "synth" in g:
            if not isinstance(g["synth"], dict):
                raise ConfigError("graph.synth must be an object")
            return
        paths = [g.get("dir")] if "dir" in g else [g.get("edges"), g.get("attributes")]
        if g.get("labels") is not None:
            paths.append(g["labels"])
        if any(p is None for p in paths):
            raise ConfigError("graph needs 'dir', 'synth', or both 'edges' and 'attributes'")
        for p in paths:
            if not Path(p).exists():
                raise ConfigError(f"referenced path does not exist: {p}")

    def method_specs(self, items) -> list:
        specs = []
        for item in items:
            if isinstance(item, str):
                specs.append(MethodSpec(item, seed=self.seed))
            elif isinstance(item, dict) and "method" in item:
                specs.append(MethodSpec(item["method"], dict(item.get("params", {})), seed=self.seed))
            else:
                raise ConfigError(f"cannot read method entry {item!r}")
        return specs

    def to_dict(self) -> dict:
        return asdict(self)


def _positive(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and x > 0


def _resolve_paths(graph: dict, base: Path) -> dict:
    out = dict(graph)
    for key in ("dir", "edges", "attributes", "labels"):
        if isinstance(out.get(key), str):
            p = Path(out[key])
            out[key] = str(p if p.is_absolute() else base / p)
    return out


def config_from_dict(d: dict, base: Path | None = None, seed: int | None = None) -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("a run config must be a JSON object")
    d = dict(d)
    if seed is not None:
        d["seed"] = seed
    if "seed" not in d:
        raise ConfigError("a seed is required (config 'seed' or --seed)")
    if "graph" not in d:
        raise ConfigError("config needs a 'graph' section")
    unknown = set(d) - set(RunConfig.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"unknown config fields {sorted(unknown)}")
    if base is not None:
        d["graph"] = _resolve_paths(d["graph"], base)
    return RunConfig(**d).validate()


def load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None


def load_config(path, seed: int | None = None) -> RunConfig:
    return config_from_dict(load_json(path), Path(path).resolve().parent, seed)
