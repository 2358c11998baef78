"""Dense eigensolver checks on the symmetric generator restricted to a box with fixed particle number.

Sites of the rate window that fall outside the box {1..ell} are read as empty.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb, inf

import numpy as np

from ..errors import InputError, ResourceError
from .local import LocalFunction

MAX_BOX = 14


def sector_states(ell: int, k: int) -> np.ndarray:
    """Bitmasks (bit i-1 is site i) of all k-particle configurations of {1..ell}."""
    if not 0 <= k <= ell:
        raise InputError(f"particle number {k} outside [0, {ell}]")
    return np.array(
        [sum(1 << p for p in c) for c in combinations(range(ell), k)], dtype=np.int64
    )


def _rate_at(rate: LocalFunction, mask: int, x: int, ell: int) -> float:
    pat = []
    for w in rate.window:
        s = x + w
        pat.append((mask >> (s - 1)) & 1 if 1 <= s <= ell else 0)
    return rate.evaluate(pat)


def sector_generator(ell: int, k: int, rate: LocalFunction) -> np.ndarray:
    """Matrix of -S on the (ell, k) sector: exchanges across bonds (x, x+1), 1 <= x < ell."""
    if ell > MAX_BOX:
        raise ResourceError(f"box of {ell} sites exceeds the dense-solver cap {MAX_BOX}")
    if ell < 1:
        raise InputError("box must contain at least one site")
    states = sector_states(ell, k)
    where = {int(s): i for i, s in enumerate(states)}
    size = len(states)
    L = np.zeros((size, size))
    for i, s in enumerate(states):
        s = int(s)
        for x in range(1, ell):
            a, b = (s >> (x - 1)) & 1, (s >> x) & 1
            if a == b:
                continue
            j = where[s ^ (0b11 << (x - 1))]
            c = _rate_at(rate, s, x, ell)
            L[i, j] -= c
            L[i, i] += c
    return L


@lru_cache(maxsize=64)
def _spectrum(ell: int, k: int, window: tuple, table: tuple):
    L = sector_generator(ell, k, LocalFunction(window, table))
    if not np.allclose(L, L.T, atol=1e-12):
        raise InputError("sector generator is not symmetric; the rate is not reversible")
    vals, vecs = np.linalg.eigh(L)
    return vals, vecs


def _tol(vals: np.ndarray) -> float:
    return 1e-9 * max(1.0, float(np.abs(vals).max()))


def spectral_gap(ell: int, k: int, rate: LocalFunction | None = None) -> float:
    """Smallest nonzero eigenvalue of -S in the sector; ``inf`` for a single-state sector."""
    rate = rate or LocalFunction.constant(1.0)
    if ell > MAX_BOX:
        raise ResourceError(f"box of {ell} sites exceeds the dense-solver cap {MAX_BOX}")
    if comb(ell, k) == 1:
        return inf
    vals, _ = _spectrum(ell, k, rate.window, tuple(rate.table.tolist()))
    positive = vals[vals > _tol(vals)]
    return float(positive.min()) if positive.size else inf


def sector_values(f: LocalFunction, ell: int, k: int) -> np.ndarray:
    """Evaluate a local function (support inside {1..ell}) on every sector state."""
    if f.window and (min(f.window) < 1 or max(f.window) > ell):
        raise InputError(f"support {f.window} is not inside {{1..{ell}}}")
    out = []
    for s in sector_states(ell, k):
        out.append(f.evaluate([(int(s) >> (w - 1)) & 1 for w in f.window]))
    return np.array(out)


def h_minus_one_norm(f, ell: int, k: int, rate: LocalFunction | None = None) -> float:
    """<f, (-S)^+ f> under the uniform sector measure.

    ``f`` is a LocalFunction supported in {1..ell} or a vector over
    :func:`sector_states`. It must have zero sector mean.
    """
    rate = rate or LocalFunction.constant(1.0)
    vec = sector_values(f, ell, k) if isinstance(f, LocalFunction) else np.asarray(f, float)
    if vec.size != comb(ell, k):
        raise InputError("vector length does not match the sector size")
    scale = max(1.0, float(np.abs(vec).max()))
    if abs(vec.mean()) > 1e-10 * scale:
        raise InputError("f is not centered in the sector")
    if vec.size == 1:
        return 0.0
    vals, vecs = _spectrum(ell, k, rate.window, tuple(rate.table.tolist()))
    coef = vecs.T @ vec
    keep = vals > _tol(vals)
    return float(np.sum(coef[keep] ** 2 / vals[keep]) / vec.size)


def sector_inner(f: np.ndarray, g: np.ndarray) -> float:
    return float(np.mean(np.asarray(f) * np.asarray(g)))
