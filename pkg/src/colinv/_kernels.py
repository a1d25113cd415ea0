"""Compiled row-wise kernels for the steepest-descent inner loop.

Each kernel treats rows independently and sums in a fixed order, so a row's
result never depends on the other rows in the batch.
"""
from __future__ import annotations

import math

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def armijo_step(g2, q, alpha, beta, t_init):
    # f(b - t g) = f(b) - t ||g||^2 + t^2 q, so Armijo reads t q <= (1 - alpha) ||g||^2
    rhs = (1.0 - alpha) * g2
    t = t_init
    while t * q > rhs:
        t *= beta
    return t


@numba.njit(cache=True, nogil=True)
def armijo_steps(g2, q, alpha, beta, t_init, out):
    for i in range(g2.shape[0]):
        out[i] = armijo_step(g2[i], q[i], alpha, beta, t_init)


@numba.njit(cache=True, nogil=True)
def sd_update(X, G, HG, g2, t, targets, alpha, beta, t_init):
    """One steepest-descent step for every row, in place.

    Reads the gradient rows ``G`` and their products ``HG = G H``, picks each
    step by backtracking, updates ``X`` and ``G`` and refreshes ``g2``. Returns
    bit 1 if some row now has ``||g|| <= target`` and bit 2 if some squared
    gradient norm is not finite.
    """
    k, n = X.shape
    flags = 0
    for i in range(k):
        q = 0.0
        for j in range(n):
            q += G[i, j] * HG[i, j]
        ti = armijo_step(g2[i], q, alpha, beta, t_init)
        t[i] = ti
        t2 = 2.0 * ti
        s = 0.0
        for j in range(n):
            X[i, j] -= ti * G[i, j]
            gj = G[i, j] - t2 * HG[i, j]
            G[i, j] = gj
            s += gj * gj
        g2[i] = s
        if not math.isfinite(s):
            flags |= 2
        elif math.sqrt(s) <= targets[i]:
            flags |= 1
    return flags


def warm_up():
    """Compile the kernels (a no-op once cached)."""
    z = np.zeros((1, 1))
    v = np.ones(1)
    sd_update(z.copy(), z.copy(), z.copy(), v.copy(), v.copy(), v.copy(), 0.25, 0.5, 1.0)
    armijo_steps(v, v, 0.25, 0.5, 1.0, v.copy())
