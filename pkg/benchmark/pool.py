"""
Ordered worker pool for per-image work.

Results always come back in input order, so everything aggregated after
the gather is identical to a single-threaded run.
"""
import concurrent.futures
import logging

logger = logging.getLogger(__name__)


def ordered_map(func, items, threads=1):
    """
    Apply ``func`` to every item and return the results as a list in input order.

    - threads == 1 runs inline without an executor.
    - The first exception raised by a worker propagates to the caller after
      the pool shuts down.
    """
    items = list(items)
    if threads < 1:
        raise ValueError("threads must be at least 1")

    if threads == 1 or len(items) <= 1:
        return [func(item) for item in items]

    logger.debug("Mapping %d items over %d threads", len(items), threads)
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))
