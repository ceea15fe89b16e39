"""Optional process-level parallelism for grid evaluations.

``THETA_RIGIDITY_THREADS`` caps the number of worker processes (default: the
CPU count). Results always come back in input order.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

ENV_VAR = "THETA_RIGIDITY_THREADS"
MIN_BATCH = 8


def worker_count() -> int:
    raw = os.environ.get(ENV_VAR)
    cpus = os.cpu_count() or 1
    if raw is None or raw.strip() == "":
        return cpus
    try:
        return max(1, min(int(raw), cpus))
    except ValueError:
        return 1


def ordered_map(fn, items: list) -> list:
    """``[fn(x) for x in items]``, spread over worker processes when worthwhile."""
    workers = min(worker_count(), len(items))
    if workers <= 1 or len(items) < MIN_BATCH:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
