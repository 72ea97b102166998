"""Order-preserving process-pool map.

Workers are forked so large read-only inputs are inherited instead of
pickled; results come back in input order, which keeps every merge
deterministic regardless of the worker count.
"""
from __future__ import annotations

import multiprocessing as mp
import os
from concurrent.futures import ProcessPoolExecutor

WORKERS_ENV = "NETLABEL_WORKERS"

_STATE = None


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _call(item):
    fn, shared = _STATE
    return fn(shared, item)


def pmap(fn, items, workers: int = 1, shared=None) -> list:
    """``[fn(shared, item) for item in items]``, optionally across forked workers."""
    global _STATE
    items = list(items)
    if workers <= 1 or len(items) <= 1 or "fork" not in mp.get_all_start_methods():
        return [fn(shared, item) for item in items]
    previous = _STATE
    _STATE = (fn, shared)
    try:
        ctx = mp.get_context("fork")
        with ProcessPoolExecutor(min(workers, len(items)), mp_context=ctx) as pool:
            return list(pool.map(_call, items))
    finally:
        _STATE = previous


def chunked(n: int, size: int):
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]
