"""Worker pool for partitioned exhaustive searches.

Tasks are independent picklable values handed to a module-level function.
With ``jobs > 1`` they run on a process pool kept for the whole search and
gated by an asyncio semaphore. Results always come back in task order, so
merging is schedule-independent.
"""

from __future__ import annotations

import asyncio
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Sequence, TypeVar

from cayley.errors import TimeBudgetExceeded

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# slack given to workers past the deadline before the parent stops waiting
DEADLINE_GRACE = 2.0


def default_jobs() -> int:
    return os.cpu_count() or 1


def deadline_after(seconds: float | None) -> float | None:
    return None if seconds is None else time.time() + seconds


def check_deadline(deadline: float | None, frontier: int, best: Any = None) -> None:
    if deadline is not None and time.time() > deadline:
        raise TimeBudgetExceeded(frontier, best)


class WorkerPool:
    """One process pool shared by every batch of a search.

    ``jobs <= 1`` keeps everything inline and never starts a process.
    """

    def __init__(self, jobs: int = 1) -> None:
        self.jobs = jobs
        self._executor: ProcessPoolExecutor | None = None

    def __enter__(self) -> WorkerPool:
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    @property
    def executor(self) -> ProcessPoolExecutor:
        if self._executor is None:
            logger.debug("starting %d worker process(es)", self.jobs)
            self._executor = ProcessPoolExecutor(max_workers=self.jobs)
        return self._executor

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=False, cancel_futures=True)
            self._executor = None

    def run(
        self,
        fn: Callable[[T], R],
        tasks: Sequence[T],
        deadline: float | None = None,
        frontier: int = 0,
    ) -> list[R]:
        """Apply ``fn`` to every task; results in task order."""
        if self.jobs <= 1 or len(tasks) <= 1:
            return [fn(t) for t in tasks]
        try:
            return asyncio.run(self._run_async(fn, tasks, deadline, frontier))
        except TimeBudgetExceeded:
            # abandoned workers may still be busy
            self.close()
            raise

    async def _run_async(
        self,
        fn: Callable[[T], R],
        tasks: Sequence[T],
        deadline: float | None,
        frontier: int,
    ) -> list[R]:
        loop = asyncio.get_running_loop()
        semaphore = asyncio.Semaphore(self.jobs)
        executor = self.executor

        async def one(task: T) -> R:
            async with semaphore:
                return await loop.run_in_executor(executor, fn, task)

        timeout = None if deadline is None else max(0.0, deadline - time.time()) + DEADLINE_GRACE
        try:
            return await asyncio.wait_for(asyncio.gather(*(one(t) for t in tasks)), timeout=timeout)
        except asyncio.TimeoutError:
            logger.warning("workers overran the deadline by %.1fs; abandoning %d task(s)", DEADLINE_GRACE, len(tasks))
            raise TimeBudgetExceeded(frontier) from None


def run_tasks(
    fn: Callable[[T], R],
    tasks: Sequence[T],
    jobs: int = 1,
    deadline: float | None = None,
    frontier: int = 0,
) -> list[R]:
    """One-off batch on a pool that lives only for this call."""
    with WorkerPool(jobs) as pool:
        return pool.run(fn, tasks, deadline, frontier)
