"""Small shared helpers."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

__all__ = ["ordered_map"]


def ordered_map(fn, items, threads: int = 1) -> list:
    """Map fn over items, results in input order regardless of thread count."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
