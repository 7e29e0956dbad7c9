import os
from concurrent import futures

from .utils import logger


class QueueFull(RuntimeError):
    pass


class Sweep:
    """
    Runs independent jobs on a lazily created thread pool. numpy releases
    the GIL inside the batched matrix products, so solver runs overlap.
    """

    def __init__(self, *, max_workers=None, max_queue_size=1000):
        """
        :param max_workers: Thread pool size, default CPU count.
        :param max_queue_size: Jobs that may wait for a worker before
                submit refuses more, default 1000.
        """
        self._max_workers = max_workers
        self._max_queue_size = max_queue_size
        self._thread_pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._thread_pool is not None:
            self._thread_pool.shutdown()
            self._thread_pool = None

    def submit(self, fn, *args, **kwargs):
        pool = self._get_thread_pool()
        if pool._work_queue.qsize() >= self._max_queue_size:
            raise QueueFull(f"sweep queue is full ({self._max_queue_size} jobs)")
        return pool.submit(fn, *args, **kwargs)

    def run_all(self, jobs):
        """
        Runs (fn, args) pairs and returns their results in job order. The
        first failing job's exception is re-raised once all jobs are done.
        """
        pending = [self.submit(fn, *args) for fn, args in jobs]
        futures.wait(pending)

        results = []
        for i, f in enumerate(pending):
            err = f.exception()
            if err is not None:
                logger.error("sweep job %d failed: %s", i, err)
                raise err
            results.append(f.result())
        return results

    def _get_thread_pool(self):
        if self._thread_pool is None:
            if self._max_workers is None:
                self._max_workers = os.cpu_count() or 1
            self._thread_pool = futures.ThreadPoolExecutor(
                max_workers=self._max_workers)
        return self._thread_pool
