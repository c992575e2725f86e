"""
A first task program
====================

Three small functions become tasks. Each call to a task returns at once;
the runtime works out from the arguments which calls must wait for which.
"""

# %%
# Every positional argument gets an access mode. ``a`` is a one-element
# view into an array, so it names a piece of memory the task reads or
# writes; ``b`` is a plain number and only parameterises the call.
import numpy as np

import pyss
from pyss import IN, INOUT, OUT, PARAMETER


def set(a, b):
    a[0] = b


def increment(a):
    a[0] += 1


def output(a):
    print(a[0])


set_task = pyss.task(set, [OUT, PARAMETER])
increment_task = pyss.task(increment, [INOUT])
output_task = pyss.task(output, [IN])

# %%
# ``init(2, INFO)`` starts one worker thread; the calling thread is the
# second one and also runs tasks while it waits in ``finish``.
a = np.array([1, 11])

pyss.init(2, pyss.INFO)
for i in range(2):
    set_task(a[i:i + 1], i)
    increment_task(a[0:1])
    output_task(a[0:1])
summary = pyss.finish()

# %%
# Only ``a[0]`` is printed, so the program prints 1 and then 2 whatever
# the interleaving. Six task instances ran.
print("executed", summary.executed_count, "tasks; a =", a)
