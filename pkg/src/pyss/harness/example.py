"""The three-task set / increment / output example.

Two loop iterations over ``a = [1, 11]`` submit six tasks. Only
``a[0]`` is ever printed, so the output is ``1`` then ``2``.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from .. import api
from .. import runtime as _rt
from ..model import IN, INOUT, OUT, PARAMETER

N_THREADS = 2


@dataclass
class ExampleResult:
    lines: list[str]
    summary: _rt.RunSummary
    runtime: _rt.Runtime
    data: list[int]


def run_minimal_example(threads: int = N_THREADS, log_level="info", *, serial: bool = False,
                        echo=None) -> ExampleResult:
    """Run the example; ``echo`` is a stream that also receives the printed lines."""
    lines: list[str] = []

    def set(a, b):
        a[0] = b

    def increment(a):
        a[0] += 1

    def output(a):
        text = str(int(a[0]))
        lines.append(text)
        if echo is not None:
            print(text, file=echo, flush=True)

    set_task = api.task(set, [OUT, PARAMETER])
    increment_task = api.task(increment, [INOUT])
    output_task = api.task(output, [IN])

    a = np.array([1, 11])
    was_serial = api.is_serial()
    if serial != was_serial:
        api.set_execution_mode(serial)
    try:
        rt = _rt.init(threads, log_level)
        for i in range(2):
            set_task(a[i:i + 1], i)
            increment_task(a[0:1])
            output_task(a[0:1])
        summary = _rt.finish()
    finally:
        if api.is_serial() != was_serial:
            api.set_execution_mode(was_serial)
    return ExampleResult(lines, summary, rt, [int(x) for x in a])


if __name__ == "__main__":
    run_minimal_example(echo=sys.stdout)
