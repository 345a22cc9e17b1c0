import logging
from concurrent.futures import ProcessPoolExecutor

logger = logging.getLogger(__name__)


def ordered_map(fn, items, workers=1):
    """Map ``fn`` over ``items`` and return results in input order.

    With more than one worker the jobs run in a process pool; ``fn`` and the
    items must then be picklable. Callers reduce the results in index order,
    so outputs never depend on ``workers``.
    """
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    workers = min(workers, len(items))
    logger.debug("dispatching %d jobs to %d worker processes", len(items), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
