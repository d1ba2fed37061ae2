import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    """Worker threads: ERGOCOUNT_THREADS if set, else the CPU count."""
    env = os.environ.get("ERGOCOUNT_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def pmap(fn, items, threads: int | None = None) -> list:
    """Ordered map; the compiled kernels drop the GIL, so threads give real parallelism."""
    items = list(items)
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
