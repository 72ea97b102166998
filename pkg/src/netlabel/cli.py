"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 input file error, 4 runtime
failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bias import bias_reports, delta_bias
from .config import load_config, load_json
from .errors import ConfigError, NetlabelError, ParseError
from .io import (read_edges, read_graph, read_labels_dir, write_csv, write_edges, write_graph,
                 write_labelset, write_report)
from .listeners import (MIN_ARTISTS, MIN_PLAYS, labels_from_play_log, read_genres, read_play_log,
                        write_id_map)
from .models import KNN_BUDGETS, MODEL_KINDS, ModelSpec, build_model, match_density
from .parallel import default_workers
from .pipeline import Run, reproduce
from .similarity import SIMILARITIES
from .synth import SynthConfig, generate_synthetic

EXIT_OK, EXIT_CONFIG, EXIT_PARSE, EXIT_RUNTIME = 0, 2, 3, 4

log = logging.getLogger("netlabel")


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ConfigError(f"{args.command} needs " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _out_dir(args) -> Path:
    _need(args, "out")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run(args) -> Run:
    _need(args, "config")
    return Run(load_config(args.config, args.seed), args.workers)


# ---------------------------------------------------------------------------
# commands


def cmd_synth(args):
    _need(args, "config")
    d = load_json(args.config)
    d = d.get("synth", d) if isinstance(d, dict) else d
    if not isinstance(d, dict):
        raise ConfigError("synth config must be a JSON object")
    if args.seed is not None:
        d = {**d, "seed": args.seed}
    cfg = SynthConfig.from_dict(d)
    G, truth = generate_synthetic(cfg)
    out = _out_dir(args)
    write_graph(G, out)
    write_report({"synth": cfg.to_dict(), "community": truth.community,
                  "fan_rate": truth.fan_rate, "prevalence": truth.prevalence,
                  "within_fraction": truth.within_fraction},
                 out / "truth.json", cfg.to_dict(), cfg.seed)


def cmd_derive_labels(args):
    _need(args, "plays", "genres")
    log_ = read_play_log(args.plays)
    labels = labels_from_play_log(log_, read_genres(args.genres), args.min_plays, args.min_artists)
    out = _out_dir(args)
    for L in labels.values():
        write_labelset(L, out / "labels")
    write_id_map(log_.users, out / "users.tsv")
    write_id_map(log_.artists, out / "artists.tsv")


def cmd_infer(args):
    _need(args, "graph", "out")
    G = read_graph(args.graph)
    lam = args.lam if args.lam is not None else match_density(G.edges, args.density_factor,
                                                              args.model, args.knn_budget)
    spec = ModelSpec(args.model, args.similarity, lam, args.density_factor)
    write_edges(build_model(G.attributes, spec, workers=args.workers), args.out)


def cmd_bias(args):
    _need(args, "edges", "labels", "out")
    e = read_edges(args.edges)
    labelsets = read_labels_dir(args.labels, e.num_nodes)
    if not labelsets:
        raise ConfigError(f"no labelset found in {args.labels}")
    base = bias_reports(e, labelsets.values())
    header = ["labelset", "prevalence", "bias", "n_evaluated"]
    deltas = {}
    if args.compare:
        other = bias_reports(read_edges(args.compare, e.num_nodes), labelsets.values())
        summary = delta_bias(base, other, str(args.edges), str(args.compare))
        deltas = summary.deltas
        header.append("delta_bias")
        write_report({"source": summary.source, "target": summary.target, "mu": summary.mu,
                      "sigma": summary.sigma, "deltas": summary.deltas},
                     Path(args.out).with_suffix(".json"))
    rows = []
    for name in sorted(base):
        r = base[name]
        row = [name, r.prevalence, r.bias, r.n_evaluated]
        if args.compare:
            row.append(deltas.get(name))
        rows.append(row)
    write_csv(args.out, header, rows)


def _report(out, run, name, summary):
    write_report(summary, out / f"{name}.json", run.cfg.to_dict(), run.cfg.seed)


def cmd_evaluate(args):
    run = _run(args)
    out = _out_dir(args)
    table, cells, means = run.heatmap()
    write_csv(out / "lift_heatmap.csv", *cells)
    write_csv(out / "mean_lift.csv", *means)
    _report(out, run, "evaluate", {"null_cells": table.null_count(),
                                   "row_means_ga": table.row_means("GA")})


def cmd_sweep_density(args):
    run = _run(args)
    out = _out_dir(args)
    write_csv(out / "density_sweep.csv", *run.density())
    _report(out, run, "sweep_density", {"factors": run.cfg.density_factors})


def cmd_sweep_bfs(args):
    run = _run(args)
    out = _out_dir(args)
    write_csv(out / "bfs_sweep.csv", *run.bfs())
    _report(out, run, "sweep_bfs", {"sizes": run.cfg.bfs_sizes})


def cmd_bias_lift(args):
    run = _run(args)
    out = _out_dir(args)
    points, fits = run.bias_lift()
    write_csv(out / "lift_points.csv", *points)
    write_csv(out / "fits.csv", *fits)
    _report(out, run, "bias_lift", {"fits": [dict(zip(fits[0], row)) for row in fits[1]]})


def cmd_reproduce(args):
    _need(args, "config")
    reproduce(load_config(args.config, args.seed), _out_dir(args), args.workers)


COMMANDS = {
    "synth": (cmd_synth, "generate a synthetic attributed graph"),
    "derive-labels": (cmd_derive_labels, "derive genre labelsets from a play log"),
    "infer": (cmd_infer, "build a KNN or threshold network from node attributes"),
    "bias": (cmd_bias, "network-label bias per labelset"),
    "evaluate": (cmd_evaluate, "lift table for every model and method"),
    "sweep-density": (cmd_sweep_density, "mean lift while varying model density"),
    "sweep-bfs": (cmd_sweep_bfs, "mean lift while varying BFS neighborhood size"),
    "bias-lift": (cmd_bias_lift, "regress labelset bias and prevalence on lift"),
    "reproduce": (cmd_reproduce, "run every table and write a CSV bundle with a manifest"),
}


def _global_flags(default) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=default, help="run or generator config (JSON)")
    p.add_argument("--seed", type=int, default=default, help="overrides the config seed")
    p.add_argument("--workers", type=int, default=default,
                   help="worker processes (default: $NETLABEL_WORKERS or CPU count)")
    p.add_argument("--out", default=default, help="output directory or file")
    p.add_argument("-v", "--verbose", action="store_true", default=default)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netlabel", description="Label inference on attributed "
                                     "social graphs.", parents=[_global_flags(None)])
    parser.set_defaults(verbose=False)
    sub = parser.add_subparsers(dest="command", required=True)
    # flags may come before or after the subcommand; SUPPRESS keeps the
    # subcommand from resetting values given before it
    flags = _global_flags(argparse.SUPPRESS)
    cmds = {name: sub.add_parser(name, help=help_, parents=[flags])
            for name, (_, help_) in COMMANDS.items()}

    p = cmds["derive-labels"]
    p.add_argument("--plays", help="user<TAB>artist<TAB>plays file")
    p.add_argument("--genres", help="genre<TAB>artist file")
    p.add_argument("--min-plays", type=int, default=MIN_PLAYS)
    p.add_argument("--min-artists", type=int, default=MIN_ARTISTS)

    p = cmds["infer"]
    p.add_argument("--graph", help="graph directory (edges.tsv, attributes.tsv)")
    p.add_argument("--model", choices=MODEL_KINDS, default="knn")
    p.add_argument("--similarity", choices=SIMILARITIES, default="intersection")
    p.add_argument("--density-factor", type=float, default=1.0)
    p.add_argument("--knn-budget", choices=KNN_BUDGETS, default="arcs")
    p.add_argument("--lam", type=int, help="explicit edge budget instead of density matching")

    p = cmds["bias"]
    p.add_argument("--edges", help="edge file")
    p.add_argument("--labels", help="labels directory")
    p.add_argument("--compare", help="second edge file; adds delta_bias")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.workers is None:
        args.workers = default_workers()
    fn = COMMANDS[args.command][0]
    try:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        fn(args)
    except ConfigError as exc:
        print(f"netlabel {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParseError as exc:
        print(f"netlabel {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NetlabelError, OSError) as exc:
        print(f"netlabel {args.command}: failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
