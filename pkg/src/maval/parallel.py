"""Order-preserving thread map capped by the MAVAL_THREADS environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def max_threads() -> int:
    try:
        return max(1, int(os.environ.get("MAVAL_THREADS", "1")))
    except ValueError:
        return 1


def thread_map(fn, items):
    items = list(items)
    workers = min(max_threads(), len(items)) if items else 1
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
