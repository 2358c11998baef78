"""Compiled event loop: sum-tree bond selection plus exact time integration of additive functionals."""

from __future__ import annotations

import numpy as np
from numba import njit

REACHED = 0
NEED_RANDOMS = 1
EVENT_CAP = 2


@njit(cache=True, inline="always")
def _rate(eta, N, x, rtab, rwin, boost):
    y = x + 1
    if y == N:
        y = 0
    a = eta[x]
    if a == eta[y]:
        return 0.0
    idx = 0
    for j in range(rwin.size):
        idx |= np.int64(eta[(x + rwin[j] + N) % N]) << j
    r = rtab[idx]
    if a == 0:
        r *= boost
    return r


@njit(cache=True)
def build_tree(eta, N, P, rtab, rwin, boost, tree):
    tree[:] = 0.0
    for x in range(N):
        tree[P + x] = _rate(eta, N, x, rtab, rwin, boost)
    for i in range(P - 1, 0, -1):
        tree[i] = tree[2 * i] + tree[2 * i + 1]


@njit(cache=True, inline="always")
def _pick(tree, P, u):
    i = 1
    while i < P:
        left = tree[2 * i]
        if u < left:
            i = 2 * i
        else:
            u -= left
            i = 2 * i + 1
    if tree[i] <= 0.0:
        # rounding pushed the descent onto an idle bond; take the nearest active one
        j = i
        while j > P and tree[j] <= 0.0:
            j -= 1
        while tree[j] <= 0.0:
            j += 1
        i = j
    return i - P


@njit(cache=True, inline="always")
def _refresh(tree, P, lo, hi):
    # recompute ancestors of leaves lo..hi (no wrap)
    a = (P + lo) >> 1
    b = (P + hi) >> 1
    while a >= 1:
        for i in range(a, b + 1):
            tree[i] = tree[2 * i] + tree[2 * i + 1]
        a >>= 1
        b >>= 1


@njit(cache=True, inline="always")
def _local_value(eta, N, y, win, wlen, tab):
    idx = 0
    for j in range(wlen):
        idx |= np.int64(eta[(y + win[j] + N) % N]) << j
    return tab[idx]


@njit(cache=True, inline="always")
def _local_delta(eta, N, b, lwin, lwlen, lmin, lmax, ltab, lw, lval, sign):
    for k in range(lwlen.size):
        s = 0.0
        for y0 in range(b - lmax[k], b + 2 - lmin[k]):
            y = (y0 + N) % N
            s += _local_value(eta, N, y, lwin[k], lwlen[k], ltab[k]) * lw[k, y]
        lval[k] += sign * s


@njit(cache=True)
def advance(eta, J, jumps, tree, P, rtab, rwin, boost, reach_lo, reach_hi,
            t, t_next, pending, t_stop, E, U, pos, max_events,
            lwin, lwlen, lmin, lmax, ltab, lw, lval, lacc,
            bell, bsum, bw, bval, bacc, rho):
    """Run events until ``t_stop``, the random buffers run out, or ``max_events``.

    ``t_next`` is the already-drawn time of the next event when ``pending`` is
    False; it survives across calls so stopping at sample times never alters
    the trajectory.
    """
    N = eta.size
    nev = 0
    nb = bell.size
    nl = lval.size
    has_integrands = nb + nl > 0
    while True:
        if pending:
            R = tree[1]
            if R <= 0.0:
                t_next = np.inf
                pending = False
            else:
                if pos >= E.size:
                    return t, t_next, pending, pos, NEED_RANDOMS, nev
                t_next = t + E[pos] / R
                pending = False
        if t_next > t_stop:
            dt = t_stop - t
            for k in range(lval.size):
                lacc[k] += lval[k] * dt
            for k in range(nb):
                bacc[k] += bval[k] * dt
            return t_stop, t_next, pending, pos, REACHED, nev
        if nev >= max_events:
            return t, t_next, pending, pos, EVENT_CAP, nev
        if has_integrands:
            dt = t_next - t
            for k in range(nl):
                lacc[k] += lval[k] * dt
            for k in range(nb):
                bacc[k] += bval[k] * dt
        t = t_next
        b = _pick(tree, P, U[pos] * tree[1])
        pos += 1
        c = b + 1
        if c == N:
            c = 0
        if nl > 0:
            _local_delta(eta, N, b, lwin, lwlen, lmin, lmax, ltab, lw, lval, -1.0)
        if eta[b] == 1:
            J[b] += 1
            db = -1
        else:
            J[b] -= 1
            db = 1
        eta[b] += db
        eta[c] -= db
        jumps[b] += 1
        if nl > 0:
            _local_delta(eta, N, b, lwin, lwlen, lmin, lmax, ltab, lw, lval, 1.0)
        for k in range(nb):
            ell = bell[k]
            # block y covers y+1..y+ell; only blocks y=b-ell and y=b change
            y = (b - ell + N) % N
            old = bsum[k, y] / ell - rho
            bsum[k, y] += db
            new = bsum[k, y] / ell - rho
            bval[k] += (new * new - old * old) * bw[k, y]
            old = bsum[k, b] / ell - rho
            bsum[k, b] -= db
            new = bsum[k, b] / ell - rho
            bval[k] += (new * new - old * old) * bw[k, b]
        lo = b - reach_hi
        hi = b + 1 - reach_lo
        if lo >= 0 and hi < N:
            for x in range(lo, hi + 1):
                tree[P + x] = _rate(eta, N, x, rtab, rwin, boost)
            _refresh(tree, P, lo, hi)
        else:
            for x0 in range(lo, hi + 1):
                x = (x0 + N) % N
                tree[P + x] = _rate(eta, N, x, rtab, rwin, boost)
                _refresh(tree, P, x, x)
        nev += 1
        pending = True


@njit(cache=True)
def all_rates(eta, rtab, rwin, boost):
    N = eta.size
    out = np.empty(N)
    for x in range(N):
        out[x] = _rate(eta, N, x, rtab, rwin, boost)
    return out
