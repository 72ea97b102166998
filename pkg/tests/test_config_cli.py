import json

import numpy as np
import pytest

from netlabel.cli import EXIT_CONFIG, EXIT_OK, EXIT_PARSE, main
from netlabel.config import config_from_dict, load_config
from netlabel.errors import ConfigError
from netlabel.io import read_edges, read_graph

SYNTH = {"num_nodes": 120, "num_dimensions": 400, "num_communities": 4, "target_degree": 8,
         "genres": [{"name": "a", "prevalence": 0.2, "locality": 0.8, "num_artists": 40,
                     "slice_size": 10},
                    {"name": "b", "prevalence": 0.2, "locality": 0.0, "num_artists": 40,
                     "slice_size": 10},
                    {"name": "c", "prevalence": 0.2, "locality": 0.4, "num_artists": 40,
                     "slice_size": 10}]}


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return path


@pytest.fixture
def run_config(tmp_path):
    return _write(tmp_path / "run.json", {
        "seed": 4, "graph": {"synth": SYNTH}, "methods": ["NB", "NL"],
        "density_factors": [1.0], "density_methods": ["NL"], "bfs_sizes": [1, 5],
        "bfs_methods": ["NB"], "bias_lift": {"model": "KNN", "method": "NB", "bias_edges": "KNN"}})


def test_seed_is_mandatory(tmp_path, capsys):
    cfg = _write(tmp_path / "c.json", {"graph": {"synth": SYNTH}})
    assert main(["evaluate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "seed" in capsys.readouterr().err
    assert config_from_dict({"graph": {"synth": SYNTH}}, seed=3).seed == 3


@pytest.mark.parametrize("change, text", [
    ({"labelsets": []}, "labelsets"),
    ({"bogus": 1}, "unknown"),
    ({"methods": ["GA"]}, "baseline"),
    ({"methods": ["XX"]}, "XX"),
    ({"density_factors": [0]}, "density_factors"),
    ({"graph": {"dir": "/no/such/place"}}, "does not exist"),
    ({"models": {"KNN": {"model": "ring"}}}, "model"),
    ({"observed_name": "KNN"}, "unique"),
])
def test_config_validation(change, text):
    with pytest.raises(ConfigError, match=text):
        config_from_dict({"seed": 1, "graph": {"synth": SYNTH}, **change})


def test_relative_paths_resolve_against_config(tmp_path):
    (tmp_path / "g").mkdir()
    cfg = _write(tmp_path / "run.json", {"seed": 1, "graph": {"dir": "g"}})
    assert load_config(cfg).graph["dir"] == str(tmp_path / "g")


def test_unknown_labelset_is_a_config_error(run_config, tmp_path, capsys):
    d = json.loads(run_config.read_text())
    d["labelsets"] = ["nope"]
    _write(run_config, d)
    assert main(["evaluate", "--config", str(run_config), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert "nope" in capsys.readouterr().err


def test_bad_json_and_missing_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["reproduce", "--config", str(bad), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["reproduce", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path)]) \
        == EXIT_CONFIG


def test_synth_infer_bias_pipeline(tmp_path):
    synth = _write(tmp_path / "synth.json", SYNTH)
    g = tmp_path / "g"
    assert main(["synth", "--config", str(synth), "--seed", "2", "--out", str(g)]) == EXIT_OK
    G = read_graph(g)
    assert G.num_nodes == 120 and sorted(G.labelsets) == ["a", "b", "c"]
    assert json.loads((g / "truth.json").read_text())["seed"] == 2

    knn = tmp_path / "knn.tsv"
    assert main(["--workers", "1", "infer", "--graph", str(g), "--out", str(knn)]) == EXIT_OK
    e = read_edges(knn)
    assert e.provenance == "knn" and 0 < e.num_arcs <= 2 * G.edges.num_pairs()

    out = tmp_path / "bias.csv"
    assert main(["bias", "--edges", str(g / "edges.tsv"), "--labels", str(g / "labels"),
                 "--compare", str(knn), "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "labelset,prevalence,bias,n_evaluated,delta_bias" and len(lines) == 4
    summary = json.loads(out.with_suffix(".json").read_text())
    assert set(summary) >= {"mu", "sigma", "deltas"}


def test_parse_errors_exit_3(tmp_path, capsys):
    (tmp_path / "labels").mkdir()
    edges = tmp_path / "e.tsv"
    edges.write_text("# netlabel-edges 1\n# num_nodes: 3\n0\t0\n")
    code = main(["bias", "--edges", str(edges), "--labels", str(tmp_path / "labels"),
                 "--out", str(tmp_path / "b.csv")])
    assert code == EXIT_PARSE
    assert "e.tsv:3" in capsys.readouterr().err


def test_derive_labels(tmp_path):
    plays = tmp_path / "plays.tsv"
    rows = [f"u{u}\ta{a}\t{5 if u == 1 else 4}" for u in range(2) for a in range(5)]
    plays.write_text("\n".join(rows) + "\n")
    genres = tmp_path / "genres.tsv"
    genres.write_text("".join(f"rock\ta{a}\n" for a in range(5)))
    out = tmp_path / "d"
    assert main(["derive-labels", "--plays", str(plays), "--genres", str(genres),
                 "--out", str(out)]) == EXIT_OK
    assert (out / "labels" / "rock.tsv").read_text().endswith("0\t0\n1\t1\n")
    assert (out / "users.tsv").read_text() == "0\tu0\n1\tu1\n"


def test_reproduce_manifest_is_stable(run_config, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["reproduce", "--config", str(run_config), "--out", str(a), "--workers", "1"]) == EXIT_OK
    assert main(["--workers", "2", "reproduce", "--config", str(run_config), "--out", str(b)]) == EXIT_OK
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    assert ma == mb and ma["status"] == "complete" and len(ma["files"]) == 9
    fits = (a / "fig6_fig7_fits.csv").read_text().splitlines()
    assert fits[0] == "pair,y,slope,intercept,r,n"
    points = np.genfromtxt(a / "fig6_fig7_lift_points.csv", delimiter=",", skip_header=1,
                           usecols=(1,))
    assert np.allclose(points, 0.2, atol=0.05)


def test_other_experiment_commands(run_config, tmp_path):
    out = tmp_path / "o"
    for cmd, files in (("evaluate", ["lift_heatmap.csv", "mean_lift.csv", "evaluate.json"]),
                       ("sweep-density", ["density_sweep.csv"]),
                       ("sweep-bfs", ["bfs_sweep.csv"]),
                       ("bias-lift", ["lift_points.csv", "fits.csv"])):
        assert main([cmd, "--config", str(run_config), "--out", str(out), "--workers", "1"]) == EXIT_OK
        assert all((out / f).exists() for f in files)
