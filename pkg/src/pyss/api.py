"""Turning plain functions into task callables, and the serial switch.

Setting ``PYSS_SERIAL=1`` in the environment before import fixes the
library in serial mode: :func:`make_task` then hands back the original
function unchanged, so task calls cost exactly a function call.
:func:`set_execution_mode` gives the same behaviour at run time.
"""
from __future__ import annotations

import functools
import inspect
import os
from typing import Any, Callable, Iterable

from . import runtime as _rt
from .errors import InvalidParameterKind, ModeChangeWhileRunning, NotInitialized
from .model import (
    AccessMode,
    TaskDefinition,
    TaskInstance,
    datum_identity,
    is_plain_value,
    validate_mode_list,
)

SERIAL_ENV = "PYSS_SERIAL"

STATIC_SERIAL = os.environ.get(SERIAL_ENV, "").strip().lower() not in ("", "0", "false", "no")

_serial = STATIC_SERIAL


def is_serial() -> bool:
    return _serial


def set_execution_mode(serial: bool) -> None:
    """Switch every task callable between inline and asynchronous execution."""
    global _serial
    rt = _rt.active_runtime()
    if rt is not None and rt.phase is _rt.Phase.RUNNING:
        raise ModeChangeWhileRunning("finish() the running runtime before changing execution mode")
    if STATIC_SERIAL and not serial:
        raise ValueError(f"serial mode is fixed by {SERIAL_ENV}; unset it to run in parallel")
    _serial = bool(serial)


def _arity(function: Callable) -> int:
    try:
        sig = inspect.signature(function)
    except (TypeError, ValueError):
        raise TypeError(f"cannot inspect the signature of {function!r}") from None
    n = 0
    for p in sig.parameters.values():
        if p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD):
            n += 1
        elif p.kind is p.VAR_POSITIONAL:
            raise TypeError(f"{function.__qualname__} takes *args; tasks need a fixed arity")
        elif p.kind is p.KEYWORD_ONLY and p.default is p.empty:
            raise TypeError(f"{function.__qualname__} has a required keyword-only argument")
    return n


class TaskCallable:
    """A task definition that is called like the function it wraps.

    In parallel mode each call records an instance with the active
    runtime and returns immediately; in serial mode the function runs
    inline.
    """

    def __init__(self, definition: TaskDefinition):
        self.definition = definition
        functools.update_wrapper(self, definition.function)

    @property
    def modes(self) -> tuple[AccessMode, ...]:
        return self.definition.modes

    def __repr__(self):
        modes = ", ".join(m.name for m in self.definition.modes)
        return f"<task {self.definition.name} [{modes}]>"

    def _check_args(self, args):
        defn = self.definition
        if len(args) != defn.arity:
            raise TypeError(f"{defn.name}() takes {defn.arity} argument(s), got {len(args)}")
        for pos, (arg, mode) in enumerate(zip(args, defn.modes)):
            if mode is AccessMode.PARAMETER:
                if not is_plain_value(arg):
                    raise InvalidParameterKind(
                        f"{defn.name}: argument {pos} is PARAMETER but got a {type(arg).__name__}; "
                        "parameters must be plain values"
                    )
            elif is_plain_value(arg):
                raise InvalidParameterKind(
                    f"{defn.name}: argument {pos} is {mode.name} but got the immutable value {arg!r}; "
                    "dependency arguments must be mutable objects"
                )

    def __call__(self, *args) -> None:
        self._check_args(args)
        defn = self.definition
        if _serial:
            defn.function(*args)
            rt = _rt.active_runtime()
            if rt is not None and rt.serial:
                rt.note_inline()
            return None
        rt = _rt.active_runtime()
        if rt is None or rt.phase is not _rt.Phase.RUNNING:
            raise NotInitialized(f"{defn.name}: no runtime is running; call init() first")
        accesses = tuple(
            (arg if mode is AccessMode.PARAMETER else datum_identity(arg), mode)
            for arg, mode in zip(args, defn.modes)
        )
        rt.submit(TaskInstance(rt.new_instance_id(), defn, accesses, args))
        return None


def make_task(function: Callable, modes: Iterable, name: str | None = None, priority: int = 0):
    """Wrap ``function`` as a task with one access mode per positional argument.

    ``priority`` is recorded and shown in graph exports but does not
    affect scheduling.
    """
    if not callable(function):
        raise TypeError(f"{function!r} is not callable")
    modes = validate_mode_list(modes, _arity(function))
    if STATIC_SERIAL:
        return function
    if name is None:
        name = getattr(function, "__name__", "task")
    return TaskCallable(TaskDefinition(function, modes, name, int(priority)))


def task(function: Callable, modes: Iterable, priority: int = 0):
    """Shorthand for :func:`make_task` named after the function."""
    return make_task(function, modes, function.__name__, priority)


def taskify(*modes: Any, priority: int = 0):
    """Decorator form of :func:`task`.

    >>> @taskify(OUT, PARAMETER)
    ... def set_value(a, b):
    ...     a[0] = b

    The undecorated function stays reachable as ``set_value.__wrapped__``
    (not under ``PYSS_SERIAL``, where the function itself is returned).
    """
    if len(modes) == 1 and not isinstance(modes[0], (AccessMode, str)):
        modes = tuple(modes[0])

    def wrap(function):
        return task(function, modes, priority)

    return wrap
