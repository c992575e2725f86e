"""
Inspecting the dependency graph
===============================

The runtime keeps every instance and edge it created. Edges come from
three hazards on a datum: read after write, write after read, and write
after write.
"""

# %%
import numpy as np

import pyss
from pyss import IN, INOUT, OUT

produce = pyss.task(lambda dst: dst.fill(1.0), [OUT])
consume = pyss.task(lambda src, dst: np.copyto(dst, src * 2), [IN, OUT])
update = pyss.task(lambda x: np.multiply(x, 3, out=x), [INOUT])

x = np.zeros(4)
y = np.zeros(4)

rt = pyss.init(1)
produce(x)        # 1
consume(x, y)     # 2 reads x after 1 wrote it
update(x)         # 3 writes x: waits for writer 1 and reader 2
produce(y)        # 4 overwrites y: waits for writer 2
pyss.finish()

# %%
# Edges always run from an earlier to a later instance, so the graph is
# acyclic by construction.
for u, v in sorted(rt.graph.edges):
    print(f"{rt.graph.nodes[u].label} -> {rt.graph.nodes[v].label}")

# %%
# Identity is the start address of the buffer. Views that start at the
# same element alias each other; overlapping views that start elsewhere
# do not, and the runtime will not notice the overlap.
print(pyss.datum_identity(x) == pyss.datum_identity(x[0:2]))   # True
print(pyss.datum_identity(x[0:3]) == pyss.datum_identity(x[1:4]))  # False

# %%
# The graph can be written as Graphviz DOT, one colour per task function.
print(rt.graph.to_dot())
