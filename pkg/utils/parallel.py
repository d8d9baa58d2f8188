import asyncio
import logging
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


async def _gather_trials(fn: Callable[[T], R], items: List[T], workers: int) -> List[R]:
    semaphore = asyncio.Semaphore(workers)

    async def run_one(item):
        async with semaphore:
            return await asyncio.to_thread(fn, item)

    # gather keeps input order, so reductions downstream do not depend on scheduling
    return await asyncio.gather(*(run_one(item) for item in items))


def map_trials(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """Apply fn to every item, fanning out over worker threads; results come back in input order."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug(f"Running {len(items)} trials on {workers} workers")
    return asyncio.run(_gather_trials(fn, items, workers))
