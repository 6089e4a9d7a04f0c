"""Thread fan-out for independent per-slice / per-mode work.

numpy releases the GIL inside LAPACK, so threads give real overlap. Results
are collected in input order, so output never depends on worker count.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count(workers: int | None = None) -> int:
    if workers is None:
        env = os.environ.get("QTLR_THREADS")
        workers = int(env) if env else 1
    return max(1, int(workers))


def pmap(fn, items, workers: int | None = None) -> list:
    items = list(items)
    n = worker_count(workers)
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
