"""Worker pool, ready queue and the init/barrier/finish lifecycle."""
from __future__ import annotations

import enum
import itertools
import logging
import os
import sys
import threading
import time
from collections import deque
from dataclasses import dataclass, field

from .errors import (
    AlreadyInitialized,
    NotInitialized,
    SubmitFromWorker,
    TasksFailed,
)
from .graph import DependencyGraph
from .model import LogLevel, ReductionMode, RuntimeConfig, TaskInstance, TaskState

LOG_LEVEL_ENV = "PYSS_LOG_LEVEL"

logger = logging.getLogger("pyss")


class _StderrHandler(logging.StreamHandler):
    # resolve sys.stderr at emit time so redirection (and pytest capture) works
    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


def _install_handler():
    if any(isinstance(h, _StderrHandler) for h in logger.handlers):
        return
    handler = _StderrHandler()
    handler.setFormatter(
        logging.Formatter("- %(asctime)s.%(msecs)03d %(levelname)s: %(message)s", datefmt="%H:%M:%S")
    )
    logger.addHandler(handler)
    logger.propagate = False
    logger.setLevel(LogLevel.WARNING)


_install_handler()


def effective_log_level(level) -> LogLevel:
    env = os.environ.get(LOG_LEVEL_ENV)
    if env:
        return LogLevel.parse(env)
    return LogLevel.parse(level)


def log(level, message: str) -> None:
    """Emit ``message`` if ``level`` is within the configured verbosity."""
    logger.log(LogLevel.parse(level), message)


class Phase(enum.Enum):
    UNINITIALIZED = "uninitialized"
    RUNNING = "running"
    SHUTTING_DOWN = "shutting down"
    TERMINATED = "terminated"


@dataclass
class RunSummary:
    executed_count: int | None
    failed_count: int
    cancelled_count: int
    wall_time: float
    failures: dict = field(default_factory=dict)
    cancelled: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class ScheduleEvent:
    sequence: int
    kind: str  # "start" or "end"
    instance_id: int


class Runtime:
    """One instance of the task runtime.

    Most code uses the module-level :func:`init`, :func:`barrier` and
    :func:`finish`, which manage a single active runtime the way task
    callables expect. A ``Runtime`` can also be driven directly, in
    which case instances are handed to :meth:`submit` by the caller.
    """

    def __init__(self, config: RuntimeConfig | None = None, *, graph: DependencyGraph | None = None,
                 record_events: bool = False):
        self.config = config or RuntimeConfig()
        self.graph = graph if graph is not None else DependencyGraph(self.config.reduction_mode)
        self.phase = Phase.UNINITIALIZED
        self.workers: list[threading.Thread] = []
        self.events: list[ScheduleEvent] | None = [] if record_events else None
        self.max_running = 0

        self._cond = threading.Condition(threading.Lock())
        self._ready: deque[TaskInstance] = deque()
        self._outstanding = 0
        self._running = 0
        self._next_id = itertools.count(1)
        self._seq = itertools.count()
        self._pending_failures: dict[int, BaseException] = {}
        self._pending_cancelled: list[int] = []
        self._failures: dict[int, BaseException] = {}
        self._cancelled: list[int] = []
        self._inline_count = 0
        self._control: int | None = None
        self._in_task = threading.local()
        self._started_at = 0.0

    @property
    def serial(self) -> bool:
        return self.config.serial

    @property
    def executed_count(self) -> int | None:
        if self.serial:
            from .api import STATIC_SERIAL

            # with the environment switch, task calls are plain calls and go uncounted
            return None if STATIC_SERIAL else self._inline_count
        return self.graph.executed_count

    @property
    def outstanding(self) -> int:
        return self._outstanding

    def start(self) -> Runtime:
        if self.phase is not Phase.UNINITIALIZED:
            raise AlreadyInitialized("runtime was already started")
        cfg = self.config
        logger.setLevel(effective_log_level(cfg.log_level))
        self._control = threading.get_ident()
        self._started_at = time.perf_counter()
        log(LogLevel.INFO, " ### pyss::init ###")
        self.phase = Phase.RUNNING
        if cfg.serial:
            log(LogLevel.INFO, "Running serially, no worker threads.")
            return self
        for k in range(1, cfg.num_threads):
            log(LogLevel.INFO, f"adding worker: {k} of {cfg.num_threads}")
            t = threading.Thread(target=self._worker_loop, name=f"pyss-worker-{k}", daemon=True)
            self.workers.append(t)
            t.start()
        log(LogLevel.INFO, f"Running on {cfg.num_threads} threads.")
        return self

    # submission -----------------------------------------------------------

    def new_instance_id(self) -> int:
        return next(self._next_id)

    def _check_control(self):
        if self.phase is not Phase.RUNNING:
            raise NotInitialized("the runtime is not running; call init() first")
        if threading.get_ident() != self._control or getattr(self._in_task, "active", False):
            raise SubmitFromWorker("tasks may only be submitted and awaited from the control thread")

    def submit(self, instance: TaskInstance) -> int:
        """Register ``instance`` and queue it if it is ready. Never runs the body."""
        self._check_control()
        with self._cond:
            self.graph.register_instance(instance)
            state = instance.state
            if state is TaskState.CANCELLED:
                self._cancelled.append(instance.instance_id)
                self._pending_cancelled.append(instance.instance_id)
            else:
                self._outstanding += 1
                if state is TaskState.READY:
                    self._ready.append(instance)
                    self._cond.notify()
        if logger.isEnabledFor(logging.DEBUG):
            log(LogLevel.DEBUG, f"submitted {instance.label} (priority {instance.definition.priority}, "
                                f"{instance.unfinished_predecessors} pending)")
        return instance.instance_id

    def note_inline(self) -> None:
        # serial mode: the front end ran a body inline
        self._inline_count += 1

    # execution ------------------------------------------------------------

    def _take(self) -> TaskInstance:
        # caller holds the lock and has checked the queue is non-empty
        inst = self._ready.popleft()
        self.graph.mark_running(inst.instance_id)
        self._running += 1
        if self._running > self.max_running:
            self.max_running = self._running
        if self.events is not None:
            self.events.append(ScheduleEvent(next(self._seq), "start", inst.instance_id))
        return inst

    def _run(self, inst: TaskInstance) -> None:
        self._in_task.active = True
        error = None
        try:
            inst.definition.function(*inst.args)
        except Exception as exc:  # body errors are reported at the next barrier
            error = exc
        finally:
            self._in_task.active = False
        if error is not None:
            log(LogLevel.ERROR, f"task {inst.label} failed: {error!r}")
        with self._cond:
            tid = inst.instance_id
            self._running -= 1
            if self.events is not None:
                self.events.append(ScheduleEvent(next(self._seq), "end", tid))
            if error is None:
                newly = self.graph.mark_complete(tid)
                self._outstanding -= 1
                if newly:
                    nodes = self.graph.nodes
                    self._ready.extend(nodes[i] for i in newly)
                    self._cond.notify(len(newly))
            else:
                cancelled = self.graph.mark_failed(tid)
                self._failures[tid] = error
                self._pending_failures[tid] = error
                self._cancelled.extend(sorted(cancelled))
                self._pending_cancelled.extend(sorted(cancelled))
                self._outstanding -= 1 + len(cancelled)
            if self._outstanding == 0:
                self._cond.notify_all()

    def _worker_loop(self) -> None:
        cond = self._cond
        while True:
            with cond:
                while not self._ready and self.phase is Phase.RUNNING:
                    cond.wait()
                if not self._ready:
                    return
                inst = self._take()
            self._run(inst)

    # synchronisation ------------------------------------------------------

    def barrier(self) -> None:
        """Wait until every submitted task has terminated.

        The calling thread executes ready tasks while it waits. Raises
        :class:`TasksFailed` if any task failed since the previous barrier.
        """
        self._check_control()
        cond = self._cond
        while True:
            with cond:
                while not self._ready and self._outstanding:
                    cond.wait()
                if not self._outstanding:
                    failures = self._pending_failures
                    cancelled = self._pending_cancelled
                    self._pending_failures = {}
                    self._pending_cancelled = []
                    break
                inst = self._take()
            self._run(inst)
        if failures or cancelled:
            log(LogLevel.WARNING, f"{len(failures)} task(s) failed, {len(cancelled)} cancelled")
            raise TasksFailed(failures, cancelled)

    def finish(self) -> RunSummary:
        """Barrier, stop and join the workers, and summarise the run."""
        if self.phase is not Phase.RUNNING:
            raise NotInitialized("the runtime is not running")
        try:
            self.barrier()
        except TasksFailed:
            pass  # reported through the summary
        with self._cond:
            self.phase = Phase.SHUTTING_DOWN
            self._cond.notify_all()
        for t in self.workers:
            t.join()
        summary = RunSummary(
            executed_count=self.executed_count,
            failed_count=len(self._failures),
            cancelled_count=len(self._cancelled),
            wall_time=time.perf_counter() - self._started_at,
            failures=dict(self._failures),
            cancelled=sorted(self._cancelled),
        )
        if summary.executed_count is not None:
            log(LogLevel.INFO, f"Executed {summary.executed_count} tasks.")
        log(LogLevel.INFO, " ### pyss::finish ###")
        self.phase = Phase.TERMINATED
        return summary


# process-wide runtime used by task callables
_active: Runtime | None = None
_active_lock = threading.Lock()


def active_runtime() -> Runtime | None:
    return _active


def init(num_threads: int = 2, log_level=LogLevel.WARNING, *,
         reduction_mode=ReductionMode.CHAIN, record_events: bool = False,
         graph: DependencyGraph | None = None) -> Runtime:
    """Start the process-wide runtime.

    ``num_threads`` counts the calling thread, so ``num_threads - 1``
    workers are started. ``graph`` replaces the dependency engine and is
    meant for testing the runtime against a modified engine.
    """
    global _active
    from .api import is_serial

    with _active_lock:
        if _active is not None and _active.phase is Phase.RUNNING:
            raise AlreadyInitialized("init() called twice without finish()")
        config = RuntimeConfig(num_threads, log_level, reduction_mode, serial=is_serial())
        rt = Runtime(config, graph=graph, record_events=record_events)
        rt.start()
        _active = rt
    return rt


def _require_active() -> Runtime:
    rt = _active
    if rt is None or rt.phase is not Phase.RUNNING:
        raise NotInitialized("no runtime is running; call init() first")
    return rt


def barrier() -> None:
    _require_active().barrier()


def finish() -> RunSummary:
    global _active
    rt = _require_active()
    try:
        return rt.finish()
    finally:
        with _active_lock:
            if _active is rt:
                _active = None
