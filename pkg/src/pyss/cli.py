"""Command-line harness: ``pyss example|fuzz|bench|verify``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .model import ReductionMode
from .runtime import LOG_LEVEL_ENV

LEVELS = ["error", "warning", "info", "debug"]


def _seed_range(text: str) -> range:
    a, sep, b = text.partition("..")
    try:
        if not sep:
            return range(int(a), int(a) + 1)
        return range(int(a), int(b))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("thread counts must be positive")
    return values


def cmd_example(args) -> int:
    from .harness.example import run_minimal_example

    result = run_minimal_example(args.threads, args.log_level, serial=args.serial, echo=sys.stdout)
    if args.dot:
        if args.serial:
            print("--dot needs a parallel run; serial mode builds no graph", file=sys.stderr)
            return 2
        Path(args.dot).write_text(result.runtime.graph.to_dot())
    return 0 if result.summary.ok else 1


def cmd_fuzz(args) -> int:
    from .harness.fuzz import fuzz_equivalence
    from .harness.program import execute_program, generate_program, serial_oracle

    mode = ReductionMode(args.reduction)
    if args.replay is not None:
        program = generate_program(args.replay, args.tasks, args.data)
        expected = serial_oracle(program)
        print(f"seed {args.replay}: {len(program)} tasks over {program.n_data} data")
        print(f"serial oracle: {expected}")
        if args.dump_trace:
            program.save(args.dump_trace)
        failed = False
        for threads in args.threads_list:
            run = execute_program(program, threads, reduction_mode=mode, record_events=bool(args.dump_events))
            same = run.data == expected
            failed |= not same
            print(f"threads {threads}: {'match' if same else 'MISMATCH ' + str(run.data)}")
            if args.dump_events:
                from .harness.schedule import save_events

                path = Path(args.dump_events)
                if len(args.threads_list) > 1:
                    path = path.with_name(f"{path.stem}.t{threads}{path.suffix}")
                save_events(path, run.runtime.events)
        return 1 if failed else 0

    report = fuzz_equivalence(args.seeds, args.tasks, args.data, args.threads_list,
                              reduction_mode=mode, check_schedules=args.check_schedules)
    for m in report.mismatches:
        print("mismatch:", m.describe(), f"(replay with --replay {m.seed})")
    print(report.summary())
    return 0 if report.ok else 1


def cmd_bench(args) -> int:
    from .harness.bench import benchmark_speedup, format_table, rows_to_csv

    rows = benchmark_speedup(args.tasks, args.work_ms, args.threads_list, chain=args.chain)
    print(format_table(rows))
    if args.csv:
        Path(args.csv).write_text(rows_to_csv(rows))
    return 0


def cmd_verify(args) -> int:
    from .errors import MalformedEventLog
    from .harness.program import TraceProgram, build_graph
    from .harness.schedule import read_events, verify_schedule

    program = TraceProgram.load(args.trace)
    graph = build_graph(program, ReductionMode(args.reduction))
    try:
        verdict = verify_schedule(read_events(args.events), graph)
    except MalformedEventLog as exc:
        print(f"malformed event log: {exc}", file=sys.stderr)
        return 2
    if verdict.ok:
        print(f"OK: {verdict.checked_edges} edges respected")
        return 0
    for u, v in verdict.violations:
        print(f"violation: {u} -> {v} (task {v} started before task {u} ended)")
    return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pyss",
        description="Harness for the pyss task runtime.",
        epilog=f"Set {LOG_LEVEL_ENV}=error|warning|info|debug to override the log level of any command.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("example", help="run the set/increment/output example")
    ex.add_argument("--threads", type=int, default=2)
    ex.add_argument("--log-level", choices=LEVELS, default="info")
    ex.add_argument("--serial", action="store_true", help="run task calls inline")
    ex.add_argument("--dot", metavar="PATH", help="write the dependency graph as DOT")
    ex.set_defaults(func=cmd_example)

    fz = sub.add_parser("fuzz", help="compare random programs with the serial oracle")
    fz.add_argument("--seeds", type=_seed_range, default=range(0, 100), help="half-open range A..B")
    fz.add_argument("--tasks", type=int, default=50)
    fz.add_argument("--data", type=int, default=8)
    fz.add_argument("--threads-list", type=_int_list, default=[1, 2, 4, 8])
    fz.add_argument("--replay", type=int, metavar="SEED", help="run a single seed verbosely")
    fz.add_argument("--reduction", choices=[m.value for m in ReductionMode], default="chain")
    fz.add_argument("--check-schedules", action="store_true", help="also verify recorded schedules")
    fz.add_argument("--dump-trace", metavar="PATH", help="with --replay: write the program trace")
    fz.add_argument("--dump-events", metavar="PATH", help="with --replay: write the recorded events")
    fz.set_defaults(func=cmd_fuzz)

    bn = sub.add_parser("bench", help="measure speedup over serial mode")
    bn.add_argument("--tasks", type=int, default=64)
    bn.add_argument("--work-ms", type=float, default=50.0)
    bn.add_argument("--threads-list", type=_int_list, default=[1, 2, 4])
    bn.add_argument("--csv", metavar="PATH")
    bn.add_argument("--chain", action="store_true", help="make every task depend on the previous one")
    bn.set_defaults(func=cmd_bench)

    vf = sub.add_parser("verify", help="check an event log against a trace's dependency graph")
    vf.add_argument("--events", required=True, metavar="PATH")
    vf.add_argument("--trace", required=True, metavar="PATH")
    vf.add_argument("--reduction", choices=[m.value for m in ReductionMode], default="chain")
    vf.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
