"""Randomised integer task programs, their serial oracle and trace files.

Each datum is one integer held in a shared int64 array; tasks receive
one-element views of it, so element ``i`` always has the same identity.
All arithmetic is modulo :data:`MODULUS` to keep values bounded.
"""
from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import api
from .. import runtime as _rt
from ..graph import DependencyGraph
from ..model import (
    IN,
    INOUT,
    OUT,
    PARAMETER,
    REDUCTION,
    AccessMode,
    ReductionMode,
    TaskDefinition,
    TaskInstance,
)

MODULUS = 1_000_003

KINDS: dict[str, tuple[AccessMode, ...]] = {
    "set": (OUT, PARAMETER),
    "copy": (OUT, IN),
    "increment": (INOUT,),
    "add": (INOUT, IN),
    "mul": (INOUT, PARAMETER),
    "reduce": (REDUCTION, IN),
    "output": (IN,),
}

_reduce_lock = threading.Lock()


def _pause():
    # give other threads a chance between a body's read and its write
    time.sleep(0)


def _set(dst, value):
    dst[0] = value


def _copy(dst, src):
    v = src[0]
    _pause()
    dst[0] = v


def _increment(dst):
    v = dst[0]
    _pause()
    dst[0] = (v + 1) % MODULUS


def _add(dst, src):
    v = dst[0] + src[0]
    _pause()
    dst[0] = v % MODULUS


def _mul(dst, factor):
    v = dst[0] * factor
    _pause()
    dst[0] = v % MODULUS


def _reduce(acc, src):
    s = src[0]
    # commutative epochs run concurrently, so the update itself must be atomic
    with _reduce_lock:
        acc[0] = (acc[0] + s) % MODULUS


def _output(src):
    src[0]


_BODIES = {
    "set": _set,
    "copy": _copy,
    "increment": _increment,
    "add": _add,
    "mul": _mul,
    "reduce": _reduce,
    "output": _output,
}

TASKS = {kind: api.make_task(_BODIES[kind], modes, kind) for kind, modes in KINDS.items()}

# graph-only definitions, used to rebuild a DAG from a trace without running it
DEFINITIONS = {kind: TaskDefinition(_BODIES[kind], modes, kind) for kind, modes in KINDS.items()}


@dataclass(frozen=True)
class Step:
    kind: str
    args: tuple[tuple[AccessMode, int], ...]

    def __post_init__(self):
        modes = KINDS.get(self.kind)
        if modes is None:
            raise ValueError(f"unknown step kind {self.kind!r}")
        if tuple(m for m, _ in self.args) != modes:
            raise ValueError(f"{self.kind} expects modes {[m.name for m in modes]}, got {self.args}")

    @property
    def data(self) -> list[int]:
        return [v for m, v in self.args if m is not PARAMETER]

    def to_line(self) -> str:
        parts = [self.kind]
        for mode, value in self.args:
            tag = "param" if mode is PARAMETER else mode.value
            parts.append(f"{tag}:{value}")
        return " ".join(parts)

    @classmethod
    def from_line(cls, line: str) -> Step:
        kind, *fields = line.split()
        args = []
        for f in fields:
            tag, _, value = f.partition(":")
            mode = PARAMETER if tag == "param" else AccessMode.parse(tag)
            args.append((mode, int(value)))
        return cls(kind, tuple(args))


@dataclass
class TraceProgram:
    n_data: int
    steps: list[Step]
    seed: int | None = None
    initial: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.initial:
            self.initial = [0] * self.n_data
        if len(self.initial) != self.n_data:
            raise ValueError("initial values must cover every datum")
        for step in self.steps:
            for d in step.data:
                if not 0 <= d < self.n_data:
                    raise ValueError(f"datum index {d} out of range for {self.n_data} data")

    def __len__(self):
        return len(self.steps)

    def dumps(self) -> str:
        lines = [f"# n_data {self.n_data}"]
        if self.seed is not None:
            lines.append(f"# seed {self.seed}")
        lines.append("# initial " + " ".join(str(v) for v in self.initial))
        lines.extend(step.to_line() for step in self.steps)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> TraceProgram:
        header = {}
        steps = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, rest = line[1:].strip().partition(" ")
                header[key] = rest.split()
                continue
            steps.append(Step.from_line(line))
        if "n_data" in header:
            n_data = int(header["n_data"][0])
        else:
            n_data = max((d for s in steps for d in s.data), default=-1) + 1
        seed = int(header["seed"][0]) if "seed" in header else None
        initial = [int(v) for v in header.get("initial", [])]
        return cls(n_data, steps, seed, initial)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> TraceProgram:
        return cls.loads(Path(path).read_text())


def minimal_example_program() -> TraceProgram:
    """The set/increment/output loop over ``a = [1, 11]`` as a trace."""
    steps = []
    for i in range(2):
        steps.append(Step("set", ((OUT, i), (PARAMETER, i))))
        steps.append(Step("increment", ((INOUT, 0),)))
        steps.append(Step("output", ((IN, 0),)))
    return TraceProgram(2, steps, initial=[1, 11])


def generate_program(seed, n_tasks: int, n_data: int, kinds=None) -> TraceProgram:
    """A random program; the same arguments always give the same program."""
    if n_tasks < 0 or n_data < 1:
        raise ValueError("need n_tasks >= 0 and n_data >= 1")
    rng = random.Random(seed)
    names = sorted(kinds or KINDS)
    initial = [rng.randrange(MODULUS) for _ in range(n_data)]
    steps = []
    for _ in range(n_tasks):
        kind = rng.choice(names)
        args = []
        for mode in KINDS[kind]:
            if mode is PARAMETER:
                value = rng.randrange(2, 10) if kind == "mul" else rng.randrange(MODULUS)
            else:
                value = rng.randrange(n_data)
            args.append((mode, value))
        steps.append(Step(kind, tuple(args)))
    return TraceProgram(n_data, steps, seed, initial)


def serial_oracle(program: TraceProgram) -> list[int]:
    """Final data after running every step in order on a plain list."""
    v = list(program.initial)
    for step in program.steps:
        a = [x for _, x in step.args]
        k = step.kind
        if k == "set":
            v[a[0]] = a[1]
        elif k == "copy":
            v[a[0]] = v[a[1]]
        elif k == "increment":
            v[a[0]] = (v[a[0]] + 1) % MODULUS
        elif k in ("add", "reduce"):
            v[a[0]] = (v[a[0]] + v[a[1]]) % MODULUS
        elif k == "mul":
            v[a[0]] = (v[a[0]] * a[1]) % MODULUS
        elif k == "output":
            pass
        else:
            raise ValueError(f"unknown step kind {k!r}")
    return v


def build_graph(program: TraceProgram, reduction_mode=ReductionMode.CHAIN) -> DependencyGraph:
    """Register every step with a fresh engine without executing anything.

    Datum indices stand in for identities; instance ids are step
    positions starting at 1, matching a runtime that ran the program.
    """
    graph = DependencyGraph(reduction_mode)
    for i, step in enumerate(program.steps, start=1):
        accesses = tuple((value, mode) for mode, value in step.args)
        graph.register_instance(TaskInstance(i, DEFINITIONS[step.kind], accesses))
    return graph


@dataclass
class ProgramRun:
    data: list[int]
    summary: _rt.RunSummary
    runtime: _rt.Runtime


def execute_program(program: TraceProgram, num_threads: int, *, reduction_mode=ReductionMode.CHAIN,
                    record_events: bool = False, graph: DependencyGraph | None = None,
                    log_level="error") -> ProgramRun:
    """Run ``program`` through the process-wide runtime and return the final data."""
    data = np.array(program.initial, dtype=np.int64)
    views = [data[i:i + 1] for i in range(program.n_data)]
    rt = _rt.init(num_threads, log_level, reduction_mode=reduction_mode,
                  record_events=record_events, graph=graph)
    try:
        for step in program.steps:
            fn = TASKS[step.kind]
            fn(*(x if m is PARAMETER else views[x] for m, x in step.args))
    finally:
        summary = _rt.finish()
    return ProgramRun([int(x) for x in data], summary, rt)
