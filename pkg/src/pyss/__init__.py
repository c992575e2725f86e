"""pyss: asynchronous task parallelism driven by per-argument access modes.

Functions become tasks with :func:`make_task` (or :func:`task` /
:func:`taskify`). Calling a task records an instance; the runtime
derives its dependencies from the identity of its arguments and the
declared modes, and runs it on a pool of threads once they are met.

    import numpy as np
    import pyss
    from pyss import INOUT, IN

    def scale(dst, src):
        dst *= src

    scale_task = pyss.make_task(scale, [INOUT, IN])

    pyss.init(4)
    scale_task(x, y)
    pyss.finish()
"""
from .api import (
    SERIAL_ENV,
    STATIC_SERIAL,
    TaskCallable,
    is_serial,
    make_task,
    set_execution_mode,
    task,
    taskify,
)
from .errors import (
    AlreadyInitialized,
    ArityMismatch,
    DuplicateInstanceId,
    InvalidParameterKind,
    InvalidThreadCount,
    InvalidTransition,
    MalformedEventLog,
    ModeChangeWhileRunning,
    NotInitialized,
    PyssError,
    SubmitFromWorker,
    TasksFailed,
)
from .graph import DatumAccessState, DependencyGraph, export_dot, predecessors_for_access
from .model import (
    IN,
    INOUT,
    OUT,
    PARAMETER,
    REDUCTION,
    AccessMode,
    DatumId,
    LogLevel,
    ReductionMode,
    RuntimeConfig,
    TaskDefinition,
    TaskInstance,
    TaskState,
    datum_identity,
    validate_mode_list,
)
from .runtime import (
    LOG_LEVEL_ENV,
    Phase,
    RunSummary,
    Runtime,
    ScheduleEvent,
    active_runtime,
    barrier,
    finish,
    init,
    log,
)

ERROR = LogLevel.ERROR
WARNING = LogLevel.WARNING
INFO = LogLevel.INFO
DEBUG = LogLevel.DEBUG

__version__ = "0.1.0"
