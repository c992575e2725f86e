"""
Reductions and failures
=======================

REDUCTION accesses come in two flavours. In the default chain mode they
are ordered like INOUT. In commutative mode consecutive reductions on one
datum may run in any order, so their bodies must update atomically.
"""

# %%
import threading

import numpy as np

import pyss
from pyss import IN, REDUCTION

lock = threading.Lock()


def accumulate(total, part):
    s = part.sum()
    with lock:
        total += s


acc_task = pyss.make_task(accumulate, [REDUCTION, IN])
parts = [np.full(10, i, dtype=float) for i in range(6)]

for mode in ("chain", "commutative"):
    total = np.zeros(1)
    rt = pyss.init(3, reduction_mode=mode)
    for p in parts:
        acc_task(total, p)
    pyss.finish()
    print(mode, total[0], "edges:", sorted(rt.graph.edges))

# %%
# A task that raises is marked failed; everything downstream of it is
# cancelled, independent work carries on, and the next barrier reports it.
boom = pyss.make_task(lambda x: 1 / 0, [pyss.INOUT])
show = pyss.make_task(lambda x: print("never printed"), [IN])

x, y = np.zeros(1), np.zeros(1)
pyss.init(2)
boom(x)
show(x)
acc_task(y, parts[1])
try:
    pyss.barrier()
except pyss.TasksFailed as exc:
    print(exc, "cancelled:", exc.cancelled)
print(pyss.finish())
