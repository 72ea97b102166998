"""Play logs and the listener rules that turn them into genre labelsets.

A user listens to an artist with at least ``min_plays`` plays of that artist,
and listens to a genre when they listen to at least ``min_artists`` of the
genre's artists.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .errors import InputError, ParseError
from .graph import LabelSet

log = logging.getLogger(__name__)

MIN_PLAYS = 5
MIN_ARTISTS = 5


def _sorted_ids(ids):
    ids = set(ids)
    try:
        return sorted(ids, key=int)
    except ValueError:
        return sorted(ids)


@dataclass
class PlayLog:
    """Aggregated (user, artist) play counts; ids are mapped to dense indices."""

    users: list
    artists: list
    plays: sp.csr_matrix

    @classmethod
    def from_rows(cls, rows) -> "PlayLog":
        """``rows`` of ``(user, artist, plays)``; repeated pairs are summed."""
        rows = list(rows)
        users = _sorted_ids(str(r[0]) for r in rows)
        artists = _sorted_ids(str(r[1]) for r in rows)
        u_index = {u: k for k, u in enumerate(users)}
        a_index = {a: k for k, a in enumerate(artists)}
        counts = np.array([int(r[2]) for r in rows], dtype=np.int64)
        if counts.size and counts.min() < 1:
            raise InputError("play counts must be >= 1")
        ui = np.array([u_index[str(r[0])] for r in rows], dtype=np.int64)
        ai = np.array([a_index[str(r[1])] for r in rows], dtype=np.int64)
        plays = sp.csr_matrix((counts, (ui, ai)), shape=(len(users), len(artists)))
        plays.sum_duplicates()
        plays.sort_indices()
        return cls(users, artists, plays)

    def user_index(self) -> dict:
        return {u: k for k, u in enumerate(self.users)}

    def artist_index(self) -> dict:
        return {a: k for k, a in enumerate(self.artists)}


def read_play_log(path) -> PlayLog:
    """Parse ``user<TAB>artist<TAB>plays`` lines (``#`` lines are comments)."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3 or not fields[0] or not fields[1]:
                raise ParseError("expected user<TAB>artist<TAB>plays", path, lineno)
            try:
                plays = int(fields[2])
            except ValueError:
                raise ParseError(f"play count {fields[2]!r} is not an integer", path, lineno) from None
            if plays < 1:
                raise ParseError("play count must be >= 1", path, lineno)
            rows.append((fields[0], fields[1], plays))
    return PlayLog.from_rows(rows)


def read_genres(path) -> dict:
    """Parse ``genre<TAB>artist`` lines into ``{genre: set of artist ids}``."""
    genres = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0] or not fields[1]:
                raise ParseError("expected genre<TAB>artist", path, lineno)
            genres.setdefault(fields[0], set()).add(fields[1])
    return genres


def derive_artist_listeners(plays, min_plays: int = MIN_PLAYS) -> sp.csr_matrix:
    """Boolean user x artist matrix: ``plays >= min_plays``."""
    if isinstance(plays, PlayLog):
        plays = plays.plays
    plays = sp.csr_matrix(plays)
    # copy the index arrays: eliminate_zeros compacts them in place
    listeners = sp.csr_matrix((plays.data >= min_plays, plays.indices.copy(), plays.indptr.copy()),
                              shape=plays.shape)
    listeners.eliminate_zeros()
    return listeners


def genre_matrix(genres: Mapping[str, set], artist_index: Mapping) -> tuple:
    """Artist x genre indicator and the genre names in column order.

    Artists absent from ``artist_index`` are skipped with a warning.
    """
    names = list(genres)
    rows, cols = [], []
    for g, name in enumerate(names):
        artists = genres[name]
        if not artists:
            raise InputError(f"genre {name!r} has no artist")
        unknown = [a for a in artists if a not in artist_index]
        if unknown:
            log.warning("genre %r references %d unknown artist(s)", name, len(unknown))
        for a in artists:
            if a in artist_index:
                rows.append(artist_index[a])
                cols.append(g)
    M = sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)),
                      shape=(len(artist_index), len(names)))
    return M, names


def derive_genre_labels(listeners, genres: Mapping[str, set], artist_index: Mapping | None = None,
                        min_artists: int = MIN_ARTISTS) -> dict:
    """One labelset per genre: 1 iff the user listens to ``min_artists`` of its artists.

    ``genres`` maps names to artist ids; with ``artist_index`` the ids are
    looked up there, otherwise they must already be column indices.
    """
    listeners = sp.csr_matrix(listeners).astype(np.int64)
    if artist_index is None:
        artist_index = {a: a for a in range(listeners.shape[1])}
    M, names = genre_matrix(genres, artist_index)
    counts = (listeners @ M).toarray()
    return {name: LabelSet(name, (counts[:, g] >= min_artists).astype(np.uint8))
            for g, name in enumerate(names)}


def labels_from_play_log(log_: PlayLog, genres: Mapping[str, set], min_plays: int = MIN_PLAYS,
                         min_artists: int = MIN_ARTISTS) -> dict:
    listeners = derive_artist_listeners(log_, min_plays)
    return derive_genre_labels(listeners, genres, log_.artist_index(), min_artists)


def write_id_map(ids, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{k}\t{v}\n" for k, v in enumerate(ids))
