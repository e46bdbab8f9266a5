"""
Worker pool helpers.

Work is split into contiguous index chunks and mapped with joblib; results
come back in chunk order, so the assembled output is the same for any worker
count.
"""

import logging
from typing import Any, Callable, List, Sequence

import numpy as np
from joblib import Parallel, delayed

logger = logging.getLogger(__name__)


def chunk_indices(count: int, chunk_size: int) -> List[np.ndarray]:
    """Split ``range(count)`` into contiguous chunks of at most ``chunk_size``."""
    if count <= 0:
        return []
    chunk_size = max(1, int(chunk_size))
    return [np.arange(start, min(start + chunk_size, count)) for start in range(0, count, chunk_size)]


def parallel_map(func: Callable[..., Any], items: Sequence[Any], workers: int = 1, **kwargs) -> List[Any]:
    """
    Apply ``func(item, **kwargs)`` to every item, optionally in parallel.

    Args:
        func: Picklable module-level callable
        items: Work items, processed independently
        workers: Number of joblib workers (1 runs in-process)
        **kwargs: Extra keyword arguments passed to every call

    Returns:
        List of results in the order of ``items``
    """
    workers = max(1, int(workers))
    if workers == 1 or len(items) <= 1:
        return [func(item, **kwargs) for item in items]

    logger.debug(f"Dispatching {len(items)} work items to {workers} workers")
    return Parallel(n_jobs=workers)(delayed(func)(item, **kwargs) for item in items)
