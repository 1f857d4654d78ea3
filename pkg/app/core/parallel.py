import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from app.core.config import settings

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Optional[int] = None) -> int:
    """Worker cap: explicit value, then settings, then available cores."""
    value = threads if threads is not None else settings.THREADS
    if value is None:
        value = os.cpu_count() or 1
    return max(1, int(value))


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """Order-preserving map; results never depend on the worker count."""
    items = list(items)
    workers = min(resolve_threads(threads), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
