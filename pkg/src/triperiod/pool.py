"""Ordered worker-pool map; pool size from ``TRIPERIOD_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def pool_size(default: int = 1) -> int:
    raw = os.environ.get("TRIPERIOD_THREADS")
    if raw is None:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


def ordered_map(func, items, workers: int | None = None) -> list:
    """``[func(x) for x in items]``, possibly on a thread pool; order is kept."""
    items = list(items)
    workers = pool_size() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(func, items))
