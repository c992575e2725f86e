"""
Measuring speedup
=================

Independent CPU-bound tasks against the same work run in serial mode.
The task body hashes a buffer; hashlib releases the GIL while it works,
so worker threads can use separate cores. A chain of tasks on one datum
is the control: it cannot go faster than serial.
"""

# %%
import os

from pyss.harness.bench import benchmark_speedup, format_table

cores = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count()
print("usable cores:", cores)

rows = benchmark_speedup(16, 20, [1, 2, 4])
print(format_table(rows))

# %%
print(format_table(benchmark_speedup(16, 20, [4], chain=True)))

# %%
# The full measurement is ``pyss bench --tasks 64 --work-ms 50 --threads-list 1,4``.
