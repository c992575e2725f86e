"""
Running without threads
=======================

Serial mode turns every task call into a plain function call. It is the
reference behaviour: a correct task program leaves the same data behind
in both modes.
"""

# %%
import numpy as np

import pyss
from pyss import IN, INOUT


def axpy(y, x, alpha):
    y += alpha * x


axpy_task = pyss.make_task(axpy, [INOUT, IN, pyss.PARAMETER])


def run(threads):
    rng = np.random.default_rng(0)
    blocks = [rng.standard_normal(1000) for _ in range(8)]
    pyss.init(threads)
    for step in range(20):
        axpy_task(blocks[step % 8], blocks[(step * 3 + 1) % 8], 0.5)
    pyss.finish()
    return blocks


# %%
parallel = run(4)
pyss.set_execution_mode(True)
serial = run(4)          # init starts no workers in serial mode
pyss.set_execution_mode(False)
print(all(np.array_equal(p, s) for p, s in zip(parallel, serial)))

# %%
# Setting ``PYSS_SERIAL=1`` before importing pyss has the same effect for
# the whole process, and ``make_task`` then returns the undecorated
# function, so a task call costs nothing extra.
