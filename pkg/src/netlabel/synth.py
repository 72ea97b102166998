"""Synthetic attributed social graphs with planted communities and genre tastes.

Users belong to communities. Each user's plays are Poisson draws around a
community-skewed Zipf popularity profile, scaled by a heavy-tailed activity
level. Genre fans additionally play a community-specific slice of the genre's
artists, so which artists signal a genre differs between communities. Social
ties fall inside the community with probability ``homophily`` and on a
uniformly random node otherwise. Labelsets are then derived with the
listener rules, exactly as for real play logs.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError
from .graph import AttributedGraph, EdgeSet
from .listeners import MIN_ARTISTS, MIN_PLAYS, derive_artist_listeners, derive_genre_labels
from .rng import substream

PREVALENCE_TOLERANCE = 0.05


@dataclass(frozen=True)
class GenreRule:
    """A genre with a target prevalence.

    ``locality`` in [0, 1] is the share of the genre's fan propensity placed on
    its ``owners`` communities; 0 spreads fans evenly over all communities.
    Fans play each artist of their community's slice Poisson with mean
    ``intensity`` (the config's ``genre_intensity`` when unset). They also
    play ``scene_size`` artists outside every genre block, Poisson with mean
    ``cohesion`` each, chosen per community. The scene makes fans
    resemble each other without touching the label rule. A user's fan
    propensity is scaled by ``activity ** activity_skew`` (activity relative
    to the mean), so positive skews favour heavy listeners.
    """

    name: str
    prevalence: float = 0.2
    locality: float = 0.8
    owners: int = 2
    num_artists: int = 60
    slice_size: int = 12
    scene_size: int = 0
    cohesion: float = 0.0
    intensity: float | None = None
    activity_skew: float = 0.0


@dataclass(frozen=True)
class SynthConfig:
    num_nodes: int = 2000
    num_dimensions: int = 3000
    num_communities: int = 10
    homophily: float = 0.8
    concentration: float = 0.7
    mean_plays: float = 300.0
    activity_sigma: float = 1.0
    zipf_exponent: float = 1.0
    target_degree: float = 20.0
    genre_intensity: float = 5.0
    genres: tuple = field(default_factory=lambda: tuple(
        GenreRule(f"genre{g:02d}", prevalence=0.15, locality=0.0, num_artists=200, slice_size=20,
                  scene_size=30, cohesion=0.3 * g, activity_skew=0.25 * g - 0.5)
        for g in range(10)))
    min_plays: int = MIN_PLAYS
    min_artists: int = MIN_ARTISTS
    calibrate: bool = True
    seed: int = 0

    def validate(self):
        for name in ("num_nodes", "num_dimensions", "num_communities", "min_plays", "min_artists"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 0.0 <= self.homophily <= 1.0:
            raise ConfigError("homophily must lie in [0, 1]")
        if not 0.0 <= self.concentration <= 1.0:
            raise ConfigError("concentration must lie in [0, 1]")
        if self.mean_plays <= 0 or self.target_degree <= 0:
            raise ConfigError("mean_plays and target_degree must be positive")
        if self.num_communities > self.num_nodes:
            raise ConfigError("more communities than nodes")
        names = [g.name for g in self.genres]
        if len(set(names)) != len(names):
            raise ConfigError("genre names must be unique")
        total = sum(g.num_artists for g in self.genres)
        if total > self.num_dimensions:
            raise ConfigError(f"genres need {total} artists but only {self.num_dimensions} dimensions exist")
        for g in self.genres:
            if not 0.0 <= g.prevalence <= 1.0 or not 0.0 <= g.locality <= 1.0:
                raise ConfigError(f"genre {g.name!r}: prevalence and locality must lie in [0, 1]")
            if not 1 <= g.owners <= self.num_communities:
                raise ConfigError(f"genre {g.name!r}: owners must lie in [1, num_communities]")
            if not 1 <= g.slice_size <= g.num_artists:
                raise ConfigError(f"genre {g.name!r}: slice_size must lie in [1, num_artists]")
            if g.intensity is not None and g.intensity <= 0:
                raise ConfigError(f"genre {g.name!r}: intensity must be positive")
            if g.cohesion < 0 or not 0 <= g.scene_size <= self.num_dimensions - total:
                raise ConfigError(f"genre {g.name!r}: scene needs non-negative cohesion and at most "
                                  f"{self.num_dimensions - total} artists")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["genres"] = [asdict(g) for g in self.genres]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        d = dict(d)
        if "genres" in d:
            d["genres"] = tuple(GenreRule(**g) for g in d["genres"])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown synth config fields {sorted(unknown)}")
        return cls(**d)


@dataclass
class SynthTruth:
    """Planted parameters, returned alongside the graph for oracle checks."""

    community: np.ndarray
    fans: dict
    genre_artists: dict
    fan_rate: dict
    prevalence: dict
    within_fraction: float


def _zipf(n, exponent):
    w = 1.0 / np.arange(1, n + 1) ** exponent
    return w / w.sum()


def _communities(cfg, seed):
    base = np.arange(cfg.num_nodes) % cfg.num_communities
    return substream(seed, "communities").permutation(base)


def social_edges(community: np.ndarray, homophily: float, target_degree: float, seed: int) -> EdgeSet:
    """Undirected ties: same-community partner with probability ``homophily``, else uniform."""
    n = community.size
    m = int(round(n * target_degree / 2))
    sizes = np.bincount(community)
    max_pairs = n * (n - 1) // 2
    if homophily >= 1.0:
        max_pairs = int(np.sum(sizes * (sizes - 1) // 2))
    if m < 1 or m > max_pairs // 2:
        raise ConfigError(f"target degree {target_degree} is infeasible for {n} nodes "
                          f"(at most {max_pairs // 2} ties can be sampled)")
    members = np.argsort(community, kind="stable")
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    rng = substream(seed, "edges")
    chosen = np.empty(0, dtype=np.int64)
    while chosen.size < m:
        batch = 2 * (m - chosen.size) + 64
        u = rng.integers(0, n, batch)
        local = rng.random(batch) < homophily
        c = community[u]
        v_local = members[starts[c] + rng.integers(0, np.maximum(sizes[c], 1))]
        v_any = rng.integers(0, n, batch)
        v = np.where(local, v_local, v_any)
        ok = u != v
        u, v = u[ok], v[ok]
        keys = np.minimum(u, v) * n + np.maximum(u, v)
        # keep first occurrences in draw order so the result is order-stable
        merged = np.concatenate([chosen, keys])
        _, first = np.unique(merged, return_index=True)
        chosen = merged[np.sort(first)][:m]
    pairs = np.column_stack([chosen // n, chosen % n])
    return EdgeSet.from_pairs(n, pairs, "observed")


def _background_plays(cfg, community, seed):
    """Poisson plays around each community's mixture of global and local Zipf popularity."""
    d, C = cfg.num_dimensions, cfg.num_communities
    zipf = _zipf(d, cfg.zipf_exponent)
    global_pop = zipf[substream(seed, "popularity").permutation(d)]
    profiles = np.empty((C, d))
    for c in range(C):
        local = zipf[substream(seed, "profile", c).permutation(d)]
        profiles[c] = (1 - cfg.concentration) * global_pop + cfg.concentration * local
    rows = []
    sigma = cfg.activity_sigma
    activity = np.empty(cfg.num_nodes)
    for u in range(cfg.num_nodes):
        rng = substream(seed, "plays", u)
        activity[u] = rng.lognormal(-0.5 * sigma * sigma, sigma)
        rows.append(sp.csr_matrix(rng.poisson(cfg.mean_plays * activity[u] * profiles[community[u]])))
    return sp.vstack(rows, format="csr").astype(np.int64), activity


def _genre_layout(cfg, seed):
    """Disjoint artist blocks per genre, and each community's slice of every block."""
    perm = substream(seed, "genre-artists").permutation(cfg.num_dimensions)
    artists, slices, scenes, owners = {}, {}, {}, {}
    offset = sum(g.num_artists for g in cfg.genres)
    free = np.sort(perm[offset:])
    offset = 0
    for g in cfg.genres:
        block = np.sort(perm[offset:offset + g.num_artists])
        offset += g.num_artists
        artists[g.name] = block
        rng = substream(seed, "genre-layout", g.name)
        # consecutive runs of a shuffled block: disjoint while the block is large enough
        ring = rng.permutation(block)
        slices[g.name] = [ring[(c * g.slice_size + np.arange(g.slice_size)) % g.num_artists]
                          for c in range(cfg.num_communities)]
        owners[g.name] = rng.choice(cfg.num_communities, size=g.owners, replace=False)
        scenes[g.name] = [rng.choice(free, size=g.scene_size, replace=False)
                          for _ in range(cfg.num_communities)]
    return artists, slices, scenes, owners


def _fan_plays(cfg, community, slices, scenes, seed):
    """Plays each user would add if they were a fan of each genre."""
    out = {}
    for g in cfg.genres:
        rng = substream(seed, "fan-plays", g.name)
        width = g.slice_size + g.scene_size
        intensity = cfg.genre_intensity if g.intensity is None else g.intensity
        means = np.r_[np.full(g.slice_size, intensity), np.full(g.scene_size, g.cohesion)]
        counts = rng.poisson(means, size=(cfg.num_nodes, width))
        cols = np.stack([np.r_[slices[g.name][c], scenes[g.name][c]] for c in community])
        rows = np.repeat(np.arange(cfg.num_nodes), width)
        out[g.name] = sp.csr_matrix((counts.ravel(), (rows, cols.ravel())),
                                    shape=(cfg.num_nodes, cfg.num_dimensions), dtype=np.int64)
    return out


def _fan_weights(cfg, g, owners):
    w = np.full(cfg.num_communities, 1.0 - g.locality)
    w[owners] += g.locality * cfg.num_communities / g.owners
    return w


def generate_synthetic(cfg: SynthConfig):
    """Build ``(AttributedGraph, SynthTruth)`` from ``cfg``; identical output for identical cfg."""
    cfg.validate()
    seed = cfg.seed
    community = _communities(cfg, seed)
    edges = social_edges(community, cfg.homophily, cfg.target_degree, seed)
    background, activity = _background_plays(cfg, community, seed)
    genre_artists, slices, scenes, owners = _genre_layout(cfg, seed)
    fan_plays = _fan_plays(cfg, community, slices, scenes, seed)
    genre_index = {g.name: set(genre_artists[g.name].tolist()) for g in cfg.genres}
    draws = {g.name: substream(seed, "fan-draw", g.name).random(cfg.num_nodes) for g in cfg.genres}

    weights = {g.name: _fan_weights(cfg, g, owners[g.name])[community] * activity ** g.activity_skew
               for g in cfg.genres}

    def fans_for(g, rate):
        return draws[g.name] < np.clip(rate * weights[g.name], 0, 1)

    def prevalence_for(g, rate):
        # genre blocks are disjoint, so one genre's label only sees its own block
        block = genre_artists[g.name]
        fans = fans_for(g, rate).astype(np.int64)
        sub = background[:, block] + sp.diags(fans, dtype=np.int64) @ fan_plays[g.name][:, block]
        listened = (sp.csr_matrix(sub) >= cfg.min_plays).sum(axis=1)
        return float(np.mean(np.asarray(listened).ravel() >= cfg.min_artists))

    rates = {}
    for g in cfg.genres:
        rates[g.name] = _calibrate(g, weights[g.name], prevalence_for) if cfg.calibrate \
            else g.prevalence
    fans = {g.name: fans_for(g, rates[g.name]) for g in cfg.genres}
    plays = background.copy()
    for g in cfg.genres:
        plays = plays + sp.diags(fans[g.name], dtype=np.int64) @ fan_plays[g.name]
    plays = sp.csr_matrix(plays)
    plays.eliminate_zeros()
    plays.sort_indices()
    listeners = derive_artist_listeners(plays, cfg.min_plays)
    labels = derive_genre_labels(listeners, genre_index, min_artists=cfg.min_artists)
    if cfg.calibrate:
        for g in cfg.genres:
            got = labels[g.name].prevalence
            if abs(got - g.prevalence) > PREVALENCE_TOLERANCE:
                raise ConfigError(f"genre {g.name!r}: prevalence {got:.3f} cannot be brought within "
                                  f"{PREVALENCE_TOLERANCE} of {g.prevalence}")
    G = AttributedGraph(cfg.num_nodes, edges, plays, labels, num_dimensions=cfg.num_dimensions)
    src, dst = edges.arcs()
    within = float(np.mean(community[src] == community[dst])) if src.size else 0.0
    truth = SynthTruth(community, fans, genre_artists, rates,
                       {n: L.prevalence for n, L in labels.items()}, within)
    return G, truth


def _calibrate(g, weights, prevalence_for, steps: int = 60):
    """Bisect the genre's fan rate until the derived prevalence reaches its target.

    Prevalence is non-decreasing in the rate because fan draws are fixed
    uniforms compared against it.
    """
    positive = weights[weights > 0]
    lo, hi = 0.0, 1.0 / positive.min() if positive.size else 1.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if prevalence_for(g, mid) < g.prevalence:
            lo = mid
        else:
            hi = mid
    return hi
