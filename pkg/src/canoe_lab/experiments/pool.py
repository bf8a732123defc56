"""
Bounded process pool for sweep points.
"""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar
import logging
import os

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    return os.cpu_count() or 1


def run_tasks(fn: Callable[[T], R], tasks: Sequence[T], workers: Optional[int] = None) -> List[R]:
    """
    Apply ``fn`` to every task, in task order. Runs inline for one worker;
    otherwise ``fn`` and the tasks must be picklable.
    :param fn: Module-level task function.
    :param tasks: Task descriptions.
    :param workers: Pool size; None means the available parallelism.
    :return: Results in task order.
    """
    workers = default_workers() if workers is None else workers
    workers = max(1, min(workers, len(tasks)))
    if workers == 1:
        return [fn(task) for task in tasks]
    logging.info(f"Dispatching {len(tasks)} tasks to {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))
