"""Deterministic fan-out over index ranges.

Work is split into contiguous chunks of task indices; results are gathered
back in index order, so the output never depends on the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def default_workers() -> int:
    env = os.environ.get("RAF_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def chunk_ranges(n: int, chunks: int) -> list[tuple[int, int]]:
    chunks = max(1, min(chunks, n)) if n else 1
    bounds = [n * i // chunks for i in range(chunks + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(chunks) if bounds[i] < bounds[i + 1]]


def map_ranges(fn, n: int, workers: int | None = None, args: tuple = (), per_worker: int = 4) -> list:
    """[fn(lo, hi, *args) for each chunk], in chunk order.

    ``fn`` must be a module-level function (it is pickled for the pool).
    """
    workers = default_workers() if workers is None else workers
    if workers <= 1 or n <= 1:
        return [fn(lo, hi, *args) for lo, hi in chunk_ranges(n, 1)]
    ranges = chunk_ranges(n, workers * per_worker)
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(fn, lo, hi, *args) for lo, hi in ranges]
        return [f.result() for f in futs]
