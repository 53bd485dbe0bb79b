"""
Runs one independent job per ensemble member. Member i receives child i of
``SeedSequence(seed)``; results come back in member order whatever the completion
order, so a batch is reproducible for a given (seed, members).
"""

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, TypeVar

import numpy as np
from loguru import logger

from ppm_engine.config import settings

T = TypeVar("T")


def worker_count(members: int, max_workers: Optional[int] = None) -> int:
    requested = max_workers or settings.MAX_WORKERS or os.cpu_count() or 1
    return max(1, min(requested, members))


def map_seeds(
    job: Callable[[np.random.SeedSequence], T],
    seed: int,
    members: int,
    max_workers: Optional[int] = None,
) -> List[T]:
    children = np.random.SeedSequence(seed).spawn(members)
    workers = worker_count(members, max_workers)
    logger.info(f"running {members} member(s) from seed {seed} on {workers} worker(s)")

    if workers == 1:
        return [job(child) for child in children]

    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(job, child) for child in children]
        results = []
        for index, future in enumerate(futures):
            results.append(future.result())
            logger.debug(f"member {index} of seed {seed} done")
        return results
