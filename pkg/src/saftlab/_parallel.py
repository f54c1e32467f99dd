"""Thread-pool helpers honouring the SAFTLAB_THREADS cap."""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    """Worker cap from ``SAFTLAB_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("SAFTLAB_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def parallel_map(func, items, n_jobs=None):
    """Ordered map; runs serially when only one worker is allowed."""
    items = list(items)
    n = thread_count() if n_jobs is None else max(1, int(n_jobs))
    n = min(n, len(items)) or 1
    if n == 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))
