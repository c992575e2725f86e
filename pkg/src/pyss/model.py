"""Shared vocabulary: access modes, task descriptors, states and configuration."""
from __future__ import annotations

import enum
import itertools
import logging
import numbers
from dataclasses import dataclass, field
from typing import Any, Callable, NewType

import numpy as np

from .errors import ArityMismatch


class AccessMode(enum.Enum):
    """How a task uses one of its arguments."""

    IN = "in"
    OUT = "out"
    INOUT = "inout"
    REDUCTION = "reduction"
    PARAMETER = "parameter"

    @property
    def is_dependency(self) -> bool:
        return self is not AccessMode.PARAMETER

    @property
    def writes(self) -> bool:
        return self in (AccessMode.OUT, AccessMode.INOUT, AccessMode.REDUCTION)

    @classmethod
    def parse(cls, value) -> AccessMode:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown access mode {value!r}") from None

    def __repr__(self):
        return self.name


IN = AccessMode.IN
OUT = AccessMode.OUT
INOUT = AccessMode.INOUT
REDUCTION = AccessMode.REDUCTION
PARAMETER = AccessMode.PARAMETER


class TaskState(enum.Enum):
    CREATED = "created"
    WAITING = "waiting"
    READY = "ready"
    RUNNING = "running"
    FINISHED = "finished"
    FAILED = "failed"
    CANCELLED = "cancelled"

    @property
    def terminal(self) -> bool:
        return self in (TaskState.FINISHED, TaskState.FAILED, TaskState.CANCELLED)


class ReductionMode(enum.Enum):
    """Ordering of consecutive REDUCTION accesses to one datum.

    CHAIN serialises them in submission order. COMMUTATIVE leaves the
    members of one reduction epoch mutually unordered; the task bodies
    must then make their updates atomic themselves.
    """

    CHAIN = "chain"
    COMMUTATIVE = "commutative"


class LogLevel(enum.IntEnum):
    # values are the stdlib logging levels
    ERROR = logging.ERROR
    WARNING = logging.WARNING
    INFO = logging.INFO
    DEBUG = logging.DEBUG

    @classmethod
    def parse(cls, value) -> LogLevel:
        if isinstance(value, cls):
            return value
        if isinstance(value, int):
            return cls(value)
        try:
            return cls[str(value).upper()]
        except KeyError:
            raise ValueError(f"unknown log level {value!r}") from None


# Identity of a data region: the address of its first byte for buffers,
# the object identity otherwise. Only equality matters for aliasing.
DatumId = NewType("DatumId", int)


def datum_identity(obj: Any) -> DatumId:
    """Return the aliasing key of a dependency argument.

    Numpy arrays are keyed by the address of their first element, so two
    views starting at the same element alias (as two equal pointers
    would) while views of neighbouring elements do not. Overlapping
    ranges with different start addresses are *not* detected.
    """
    if isinstance(obj, np.ndarray):
        return DatumId(obj.__array_interface__["data"][0])
    return DatumId(id(obj))


_PLAIN_VALUE_TYPES = (numbers.Number, str, bytes, tuple, frozenset, type(None))


def is_plain_value(obj: Any) -> bool:
    """True for immutable values that cannot name a data region."""
    return isinstance(obj, _PLAIN_VALUE_TYPES)


def validate_mode_list(modes, arity: int) -> tuple[AccessMode, ...]:
    modes = tuple(AccessMode.parse(m) for m in modes)
    if len(modes) != arity:
        raise ArityMismatch(arity, len(modes))
    return modes


_definition_ids = itertools.count(1)


@dataclass(frozen=True, eq=False)
class TaskDefinition:
    function: Callable[..., Any]
    modes: tuple[AccessMode, ...]
    name: str
    priority: int = 0
    definition_id: int = field(default_factory=lambda: next(_definition_ids))

    @property
    def arity(self) -> int:
        return len(self.modes)

    def __repr__(self):
        return f"TaskDefinition({self.name!r}, {list(self.modes)}, id={self.definition_id})"


@dataclass(slots=True, eq=False)
class TaskInstance:
    """One submission of a task definition.

    ``accesses`` pairs each argument position with its mode; dependency
    positions hold a :data:`DatumId`, parameter positions hold the value
    captured at submission.
    """

    instance_id: int
    definition: TaskDefinition
    accesses: tuple[tuple[Any, AccessMode], ...]
    args: tuple = ()
    state: TaskState = TaskState.CREATED
    unfinished_predecessors: int = 0

    @property
    def name(self) -> str:
        return self.definition.name

    @property
    def label(self) -> str:
        return f"{self.definition.name}#{self.instance_id}"


@dataclass(frozen=True)
class RuntimeConfig:
    num_threads: int = 2
    log_level: LogLevel = LogLevel.WARNING
    reduction_mode: ReductionMode = ReductionMode.CHAIN
    serial: bool = False

    def __post_init__(self):
        from .errors import InvalidThreadCount

        if isinstance(self.num_threads, bool) or not isinstance(self.num_threads, int) or self.num_threads < 1:
            raise InvalidThreadCount(f"num_threads must be a positive integer, got {self.num_threads!r}")
        object.__setattr__(self, "log_level", LogLevel.parse(self.log_level))
        object.__setattr__(self, "reduction_mode", ReductionMode(self.reduction_mode))
