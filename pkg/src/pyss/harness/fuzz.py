"""Differential testing of the runtime against the serial oracle."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from ..graph import DependencyGraph
from ..model import ReductionMode
from .program import execute_program, generate_program, serial_oracle
from .schedule import verify_schedule


@dataclass
class Mismatch:
    seed: int
    threads: int
    expected: list[int]
    got: list[int] | None
    error: str | None = None
    schedule_violations: list = field(default_factory=list)

    def describe(self) -> str:
        if self.error:
            return f"seed {self.seed} threads {self.threads}: {self.error}"
        if self.schedule_violations:
            return f"seed {self.seed} threads {self.threads}: edges violated {self.schedule_violations}"
        diff = [i for i, (a, b) in enumerate(zip(self.expected, self.got)) if a != b]
        return f"seed {self.seed} threads {self.threads}: data {diff} differ from the serial result"


@dataclass
class FuzzReport:
    runs: int = 0
    seeds: int = 0
    schedules_checked: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def summary(self) -> str:
        status = "OK" if self.ok else f"{len(self.mismatches)} MISMATCH(ES)"
        return f"{self.runs} runs over {self.seeds} seeds: {status}"


def fuzz_equivalence(
    seeds: Iterable[int],
    n_tasks: int,
    n_data: int,
    thread_counts: Iterable[int],
    *,
    reduction_mode=ReductionMode.CHAIN,
    graph_factory: Callable[[], DependencyGraph] | None = None,
    check_schedules: bool = False,
) -> FuzzReport:
    """Run random programs at every thread count and compare with the oracle.

    Mismatches are collected in the report, never raised, each with the
    seed needed to replay it. ``graph_factory`` swaps in a different
    dependency engine (used to check that the fuzzer catches broken rules).
    With ``check_schedules`` each run also records its events and has
    them verified against its graph.
    """
    thread_counts = list(thread_counts)
    report = FuzzReport()
    for seed in seeds:
        report.seeds += 1
        program = generate_program(seed, n_tasks, n_data)
        expected = serial_oracle(program)
        for threads in thread_counts:
            report.runs += 1
            graph = graph_factory() if graph_factory else None
            run = execute_program(program, threads, reduction_mode=reduction_mode,
                                  record_events=check_schedules, graph=graph)
            if not run.summary.ok:
                errs = "; ".join(f"{k}: {e!r}" for k, e in run.summary.failures.items())
                report.mismatches.append(Mismatch(seed, threads, expected, run.data, error=errs))
                continue
            if run.data != expected:
                report.mismatches.append(Mismatch(seed, threads, expected, run.data))
                continue
            if check_schedules:
                report.schedules_checked += 1
                verdict = verify_schedule(run.runtime.events, run.runtime.graph)
                if not verdict.ok:
                    report.mismatches.append(Mismatch(seed, threads, expected, run.data,
                                                      schedule_violations=verdict.violations))
    return report
