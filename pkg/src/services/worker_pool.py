"""Module to run independent sweep points in a pool of worker processes."""

from concurrent.futures import ProcessPoolExecutor

import psutil

from src.services.logging_config import setup_logger

# Initialize logger using the setup function
logger = setup_logger(__name__)


def resolve_worker_count(workers):
    """
    Turn the --workers flag into a process count.

    Attributes:
        workers (int): 0 for one worker per physical core, otherwise the count itself.

    Returns:
        int: Number of worker processes, at least 1.
    """
    if workers < 0:
        raise ValueError(f"workers must be non-negative, got {workers}")
    if workers == 0:
        # cpu_count(logical=False) can return None on some platforms
        workers = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    return max(1, workers)


def map_in_order(function, items, workers=1):
    """
    Apply a picklable function to every item and return the results in input order.

    With a single worker everything runs in this process.
    """
    items = list(items)
    workers = min(resolve_worker_count(workers), max(1, len(items)))
    if workers == 1:
        return [function(item) for item in items]

    logger.info(f"Running {len(items)} sweep points on {workers} worker processes")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(function, items))
