import logging
import threading
from dataclasses import dataclass
from multiprocessing import Pipe, Process
from multiprocessing.connection import Connection
from queue import Queue
from typing import Any, Callable, Dict, Iterable, List, Optional

log = logging.getLogger("tigris.threadpool")


@dataclass
class TaskOutcome:
    value: Any = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _describe(e: BaseException) -> str:
    return f"{type(e).__name__}: {e}"


def _run_in_child(pipe: Connection, function: Callable, args: tuple):
    """Entry point of a task's child process; the outcome goes back through the pipe."""
    try:
        pipe.send(TaskOutcome(value=function(*args)))
    except Exception as e:
        pipe.send(TaskOutcome(error=_describe(e)))
    finally:
        pipe.close()


class ThreadPool(object):
    def __init__(self, num_workers: int, use_processes: bool = False):
        """Threadpool class to easily specify a number of worker threads and assign work
        to any of them.

        Arguments:
        - num_workers: int, how many tasks to run simultaneously.
        - use_processes: bool, run each task in a child process (the worker thread
          waits for it). Functions and arguments must then be picklable.
        """
        if num_workers < 1:
            raise ValueError(f"num_workers must be at least 1, got {num_workers}.")
        self.num_workers = num_workers
        self.use_processes = use_processes
        self.alive = False
        self.results: Dict[int, TaskOutcome] = {}
        self._queue = Queue()
        self._busy_workers = Queue()
        self._threads = []
        self._next_id = 0
        self._lock = threading.Lock()

    def add_task(self, function, *args) -> int:
        with self._lock:
            task_id = self._next_id
            self._next_id += 1
        self._queue.put((task_id, function, args))
        return task_id

    def get_busy_workers(self):
        return self._busy_workers.qsize()

    def start(self):
        self.alive = True
        # Spawn num_workers threads that will wait for work to be added to the queue
        for _ in range(self.num_workers):
            worker = threading.Thread(target=self.handle_work, daemon=True)
            self._threads.append(worker)
            worker.start()

    def join(self):
        """Block until every queued task has finished."""
        self._queue.join()

    def stop(self):
        """Signals all threads that they should stop and waits for them to finish."""
        if not self._threads:
            self.alive = False
            return
        self.alive = False
        # Signal every thread that it's time to stop
        for _ in range(self.num_workers):
            self._queue.put((None, self._stop_thread, tuple()))
        log.debug("Stopping threadpool, waiting for threads...")
        for thread in self._threads:
            thread.join()
        self._threads = []
        log.debug("Threadpool stopped.")

    def _stop_thread(self):
        """Used to stop individual threads."""
        return

    def _execute(self, function, arguments) -> TaskOutcome:
        if not self.use_processes:
            try:
                return TaskOutcome(value=function(*arguments))
            except Exception as e:
                log.exception(f"Task {getattr(function, '__name__', function)} failed.")
                return TaskOutcome(error=_describe(e))

        pipe, child_pipe = Pipe(duplex=False)
        process = Process(target=_run_in_child, args=(child_pipe, function, arguments))
        process.start()
        # Drop our copy of the sending end so a crashed child shows up as EOF.
        child_pipe.close()
        try:
            outcome = pipe.recv()
        except EOFError:
            process.join()
            outcome = TaskOutcome(
                error=f"Worker process exited with code {process.exitcode} "
                "before reporting a result."
            )
        finally:
            pipe.close()
            process.join()
        return outcome

    def handle_work(self):
        while self.alive:
            # Wait for a new task (blocking)
            task_id, function, arguments = self._queue.get()
            if task_id is None:
                function(*arguments)
                self._queue.task_done()
                continue
            # Notify the pool that we started working
            self._busy_workers.put(1)
            self.results[task_id] = self._execute(function, arguments)
            # Notify the pool that we finished working
            self._busy_workers.get()
            self._queue.task_done()

    def map(self, function: Callable, items: Iterable[tuple]) -> List[TaskOutcome]:
        """Run `function(*item)` for every item and return the outcomes in order."""
        started_here = not self.alive
        if started_here:
            self.start()
        try:
            ids = [self.add_task(function, *item) for item in items]
            self.join()
            return [self.results.pop(task_id) for task_id in ids]
        finally:
            if started_here:
                self.stop()
