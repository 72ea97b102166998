import numpy as np
import pytest
from scipy import stats

from netlabel.errors import ConfigError
from netlabel.synth import GenreRule, SynthConfig, generate_synthetic, social_edges

SMALL = dict(num_nodes=300, num_dimensions=800, num_communities=5, target_degree=10,
             genres=(GenreRule("a", prevalence=0.2, locality=0.9, num_artists=60, slice_size=12),
                     GenreRule("b", prevalence=0.3, locality=0.0, num_artists=60, slice_size=12)))


def _community(n, k, seed=0):
    return np.random.default_rng(seed).permutation(np.arange(n) % k)


def test_no_homophily_ties_are_uniform():
    n, k = 2000, 10
    c = _community(n, k)
    e = social_edges(c, 0.0, 20, seed=4)
    src, dst = e.arcs()
    keep = src < dst
    within = int(np.sum(c[src[keep]] == c[dst[keep]]))
    total = int(keep.sum())
    sizes = np.bincount(c)
    p = np.sum(sizes * (sizes - 1)) / (n * (n - 1))
    _, pvalue = stats.chisquare([within, total - within], [total * p, total * (1 - p)])
    assert pvalue > 0.01


def test_full_homophily_keeps_ties_inside():
    c = _community(2000, 10)
    src, dst = social_edges(c, 1.0, 20, seed=4).arcs()
    assert np.all(c[src] == c[dst])


def test_degree_matches_target():
    e = social_edges(_community(500, 5), 0.5, 12, seed=1)
    assert e.num_pairs() == 3000


def test_infeasible_degree_is_a_config_error():
    with pytest.raises(ConfigError, match="infeasible"):
        social_edges(_community(20, 2), 0.5, 30, seed=0)


def test_same_seed_same_output():
    cfg = SynthConfig(**SMALL, seed=8)
    G1, t1 = generate_synthetic(cfg)
    G2, t2 = generate_synthetic(cfg)
    assert G1.edges == G2.edges
    assert (G1.attributes != G2.attributes).nnz == 0
    assert t1.fan_rate == t2.fan_rate
    G3, _ = generate_synthetic(SynthConfig(**SMALL, seed=9))
    assert G3.edges != G1.edges


def test_prevalence_is_calibrated():
    G, truth = generate_synthetic(SynthConfig(**SMALL, seed=2))
    for g in SMALL["genres"]:
        assert abs(G.labelsets[g.name].prevalence - g.prevalence) <= 0.05
        assert truth.prevalence[g.name] == G.labelsets[g.name].prevalence


def test_labels_follow_listener_rule():
    from netlabel.listeners import derive_artist_listeners
    G, truth = generate_synthetic(SynthConfig(**SMALL, seed=2))
    listeners = derive_artist_listeners(G.attributes).toarray()
    for name, artists in truth.genre_artists.items():
        count = listeners[:, artists].sum(axis=1)
        assert np.array_equal(G.labelsets[name].labels, (count >= 5).astype(np.uint8))


@pytest.mark.parametrize("change, text", [
    (dict(homophily=1.5), "homophily"),
    (dict(num_dimensions=100), "artists"),
    (dict(genres=(GenreRule("a", intensity=0.0),)), "intensity"),
    (dict(genres=(GenreRule("a", cohesion=-1.0),)), "cohesion"),
    (dict(genres=(GenreRule("a", scene_size=10_000),)), "scene"),
    (dict(genres=(GenreRule("a"), GenreRule("a"))), "unique"),
    (dict(genres=(GenreRule("a", slice_size=80),)), "slice_size"),
])
def test_validation(change, text):
    with pytest.raises(ConfigError, match=text):
        SynthConfig(**{**SMALL, **change}).validate()


def test_dict_round_trip():
    cfg = SynthConfig(**SMALL, seed=3)
    assert SynthConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ConfigError, match="unknown"):
        SynthConfig.from_dict({"nodes": 5})


def test_attributes_are_integer_counts():
    G, _ = generate_synthetic(SynthConfig(**SMALL, seed=1))
    assert np.issubdtype(G.attributes.dtype, np.integer)
