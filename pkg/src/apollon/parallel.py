"""Thread-level parallelism for independent per-pair work.

The grid search releases the GIL, so threads scale for k evaluations.
APOLLON_THREADS caps the worker count (default: machine parallelism).
Results are always returned in input order.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def max_workers() -> int:
    env = os.environ.get("APOLLON_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"APOLLON_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def pmap(fn, items) -> list:
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
