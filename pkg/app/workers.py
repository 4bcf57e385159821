from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence

from app.errors import InputError


def map_ordered(func: Callable, tasks: Sequence, jobs: int) -> List:
    """Results in task order for every `jobs`; sequential when jobs == 1."""
    if jobs < 1:
        raise InputError(f"jobs must be at least 1, got {jobs}")
    if jobs == 1 or len(tasks) <= 1:
        return [func(*task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, *zip(*tasks)))
