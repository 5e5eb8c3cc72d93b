from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from loguru import logger

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "OCRF_THREADS"


def worker_count() -> int:
    """Worker cap from OCRF_THREADS (default: CPU count), at least 1."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return max(os.cpu_count() or 1, 1)
    try:
        return max(int(raw), 1)
    except ValueError:
        logger.warning("RUNTIME | ignoring non-integer {}={!r}", THREADS_ENV, raw)
        return 1


def ordered_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Map in a thread pool; results keep input order, so output never depends on the worker count."""
    items = list(items)
    workers = min(worker_count(), max(len(items), 1))
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
