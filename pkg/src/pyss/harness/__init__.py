"""Validation harness: the reference example, fuzzing against a serial
oracle, schedule verification and a speedup benchmark."""
from .bench import BenchRow, benchmark_speedup, calibrate, format_table, rows_to_csv
from .example import ExampleResult, run_minimal_example
from .fuzz import FuzzReport, Mismatch, fuzz_equivalence
from .program import (
    KINDS,
    MODULUS,
    Step,
    TraceProgram,
    build_graph,
    execute_program,
    generate_program,
    minimal_example_program,
    serial_oracle,
)
from ..runtime import ScheduleEvent
from .schedule import (
    ScheduleVerdict,
    dump_events,
    inject_violation,
    load_events,
    read_events,
    save_events,
    serial_events,
    verify_schedule,
)
