"""Order-preserving chunked map over worker processes."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence


def chunked_map(fn: Callable[[Sequence], list], items: Sequence, threads: int = 1,
                chunk_size: int = 20_000) -> list:
    """Apply ``fn`` (list -> list) to consecutive chunks and concatenate.

    Output order never depends on ``threads``; with ``threads <= 1`` or a
    single chunk everything runs in-process.
    """
    items = list(items)
    if threads <= 1 or len(items) <= chunk_size:
        return list(fn(items))
    chunks = [items[i:i + chunk_size] for i in range(0, len(items), chunk_size)]
    out = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(fn, chunks):
            out.extend(part)
    return out
