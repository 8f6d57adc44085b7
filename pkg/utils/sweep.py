"""Bounded worker pool for grid sweeps"""
import asyncio
import logging
from typing import Callable, List, Optional, Sequence, TypeVar

from config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class SweepRunner:
    """Runs one computation per grid point in worker threads, at most `jobs` at a time"""

    def __init__(self, jobs: Optional[int] = None):
        self.jobs = max(1, jobs or settings.jobs)

    async def map(self, func: Callable[[T], R], items: Sequence[T]) -> List[R]:
        """Results in grid order, independent of completion order"""
        semaphore = asyncio.Semaphore(self.jobs)

        async def run_one(item: T) -> R:
            async with semaphore:
                return await asyncio.to_thread(func, item)

        logger.debug(f"Sweeping {len(items)} grid points with {self.jobs} workers")
        return list(await asyncio.gather(*(run_one(item) for item in items)))
