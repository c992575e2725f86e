"""
Tiled Cholesky factorisation
============================

A blocked right-looking Cholesky written as four task kinds over square
tiles. Each tile is its own array, so each is one datum; the runtime
discovers the whole DAG from the IN/INOUT annotations.
"""

# %%
import numpy as np

import pyss
from pyss import IN, INOUT


def potrf(akk):
    akk[:] = np.linalg.cholesky(akk)


def trsm(lkk, aik):
    aik[:] = np.linalg.solve(lkk, aik.T).T


def syrk(aik, aii):
    aii -= aik @ aik.T


def gemm(aik, ajk, aij):
    aij -= aik @ ajk.T


potrf_t = pyss.task(potrf, [INOUT])
trsm_t = pyss.task(trsm, [IN, INOUT])
syrk_t = pyss.task(syrk, [IN, INOUT])
gemm_t = pyss.task(gemm, [IN, IN, INOUT])

# %%
nb, bs = 6, 64
rng = np.random.default_rng(1)
m = rng.standard_normal((nb * bs, nb * bs))
spd = m @ m.T + nb * bs * np.eye(nb * bs)

tiles = [[spd[i * bs:(i + 1) * bs, j * bs:(j + 1) * bs].copy() for j in range(nb)] for i in range(nb)]

rt = pyss.init(4)
for k in range(nb):
    potrf_t(tiles[k][k])
    for i in range(k + 1, nb):
        trsm_t(tiles[k][k], tiles[i][k])
    for i in range(k + 1, nb):
        syrk_t(tiles[i][k], tiles[i][i])
        for j in range(k + 1, i):
            gemm_t(tiles[i][k], tiles[j][k], tiles[i][j])
summary = pyss.finish()

# %%
L = np.zeros_like(spd)
for i in range(nb):
    for j in range(i + 1):
        L[i * bs:(i + 1) * bs, j * bs:(j + 1) * bs] = tiles[i][j]
L = np.tril(L)
print(summary.executed_count, "tasks,", len(rt.graph.edges), "edges")
print("matches numpy:", np.allclose(L, np.linalg.cholesky(spd)))
