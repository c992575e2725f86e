"""Checking recorded start/end events against the dependency edges."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from ..errors import MalformedEventLog
from ..graph import DependencyGraph
from ..runtime import ScheduleEvent


@dataclass
class ScheduleVerdict:
    violations: list[tuple[int, int]] = field(default_factory=list)
    checked_edges: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def _index_events(events: Iterable[ScheduleEvent]):
    start: dict[int, int] = {}
    end: dict[int, int] = {}
    seen = set()
    for ev in events:
        if ev.sequence in seen:
            raise MalformedEventLog(f"sequence number {ev.sequence} appears twice")
        seen.add(ev.sequence)
        if ev.kind == "start":
            table = start
        elif ev.kind == "end":
            table = end
        else:
            raise MalformedEventLog(f"unknown event kind {ev.kind!r}")
        if ev.instance_id in table:
            raise MalformedEventLog(f"instance {ev.instance_id} has two {ev.kind} events")
        table[ev.instance_id] = ev.sequence
    for tid, seq in end.items():
        if tid not in start:
            raise MalformedEventLog(f"instance {tid} ends without starting")
        if start[tid] >= seq:
            raise MalformedEventLog(f"instance {tid} ends before it starts")
    for tid in start:
        if tid not in end:
            raise MalformedEventLog(f"instance {tid} starts but never ends")
    return start, end


def verify_schedule(events: Iterable[ScheduleEvent], graph) -> ScheduleVerdict:
    """Check that every edge ``(u, v)`` has ``end(u)`` before ``start(v)``.

    ``graph`` is a :class:`DependencyGraph` or any iterable of edges.
    Instances that never started (cancelled ones) impose no constraint.
    """
    start, end = _index_events(events)
    edges = graph.edges if isinstance(graph, DependencyGraph) else graph
    verdict = ScheduleVerdict()
    for u, v in sorted(edges):
        verdict.checked_edges += 1
        if v not in start:
            continue
        if u not in end or end[u] > start[v]:
            verdict.violations.append((u, v))
    return verdict


def inject_violation(events: list[ScheduleEvent], edge: tuple[int, int]) -> list[ScheduleEvent]:
    """Move ``start(v)`` to just before ``end(u)`` and renumber.

    The result is still a well-formed log but breaks the given edge.
    """
    u, v = edge
    ordered = sorted(events, key=lambda e: e.sequence)
    moved = next(e for e in ordered if e.kind == "start" and e.instance_id == v)
    ordered.remove(moved)
    at = next(i for i, e in enumerate(ordered) if e.kind == "end" and e.instance_id == u)
    ordered.insert(at, moved)
    return [ScheduleEvent(i, e.kind, e.instance_id) for i, e in enumerate(ordered)]


def serial_events(instance_ids: Iterable[int]) -> list[ScheduleEvent]:
    """Events of a one-at-a-time execution in the given order."""
    out = []
    seq = 0
    for tid in instance_ids:
        out.append(ScheduleEvent(seq, "start", tid))
        out.append(ScheduleEvent(seq + 1, "end", tid))
        seq += 2
    return out


def dump_events(events: Iterable[ScheduleEvent]) -> str:
    return "".join(f"{e.sequence} {e.kind} {e.instance_id}\n" for e in events)


def load_events(text: str) -> list[ScheduleEvent]:
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise MalformedEventLog(f"line {n}: expected '<seq> <start|end> <instance_id>'")
        try:
            out.append(ScheduleEvent(int(parts[0]), parts[1], int(parts[2])))
        except ValueError:
            raise MalformedEventLog(f"line {n}: bad number in {line!r}") from None
    return out


def save_events(path, events) -> None:
    Path(path).write_text(dump_events(events))


def read_events(path) -> list[ScheduleEvent]:
    return load_events(Path(path).read_text())
