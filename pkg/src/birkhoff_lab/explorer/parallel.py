"""Optional process fan-out for independent tasks.

Results never depend on the worker count: every task carries its own seed.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "BIRKHOFF_LAB_THREADS"


def worker_count() -> int:
    """Parallelism cap from ``BIRKHOFF_LAB_THREADS`` (default 1, serial)."""
    raw = os.environ.get(ENV_THREADS, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def map_tasks(fn: Callable[[T], R], tasks: Iterable[T], workers: int | None = None) -> list[R]:
    """``[fn(t) for t in tasks]``, in order, across processes when allowed.

    ``fn`` must be a module-level function so it can be pickled.
    """
    tasks = list(tasks)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def chunk_ranges(n: int, chunks: int) -> list[tuple[int, int]]:
    """Split ``range(n)`` into at most ``chunks`` contiguous ``(start, stop)`` pieces."""
    chunks = max(1, min(chunks, n)) if n else 1
    bounds = [n * k // chunks for k in range(chunks + 1)]
    return [(bounds[k], bounds[k + 1]) for k in range(chunks) if bounds[k] < bounds[k + 1]]
