"""Named, counter-based random substreams.

Every random draw in the package is derived from a single run seed plus a tuple
of keys (strings or ints), so a draw never depends on evaluation order or on
how work is partitioned across processes.
"""
from __future__ import annotations

import hashlib

import numpy as np


def _key_words(keys):
    words = []
    for key in keys:
        if isinstance(key, (int, np.integer)) and not isinstance(key, bool):
            key = int(key)
            if key < 0:
                raise ValueError("integer substream keys must be non-negative")
            words.append(key & 0xFFFFFFFF)
            words.append(key >> 32 & 0xFFFFFFFF)
        else:
            digest = hashlib.blake2b(str(key).encode("utf-8"), digest_size=8).digest()
            words.extend(np.frombuffer(digest, dtype="<u4").tolist())
    return words


def seed_sequence(seed: int, *keys) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed), spawn_key=tuple(_key_words(keys)))


def substream(seed: int, *keys) -> np.random.Generator:
    """Return a Philox generator keyed by ``(seed, *keys)``."""
    return np.random.Generator(np.random.Philox(seed_sequence(seed, *keys)))


def uniform(seed: int, *keys) -> float:
    """A single U[0, 1) draw keyed by ``(seed, *keys)``."""
    return float(substream(seed, *keys).random())
