"""Optional thread-pool fan-out for per-frequency kernels.

``QLTI_THREADS`` caps the worker count; unset or ``1`` runs serially.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("QLTI_THREADS", "1")))
    except ValueError:
        return 1


def frequency_map(func, items) -> list:
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
