"""Dense generator of the process on a tiny ring, used as an exact oracle."""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from ..errors import ResourceError
from ..lattice.model import ModelSpec
from .engine import bond_rate

MAX_EXACT_RING = 12


def state_index(occupancy) -> int:
    """Site x is bit x."""
    return int(sum(int(b) << x for x, b in enumerate(occupancy)))


def index_state(index: int, N: int) -> np.ndarray:
    return np.array([(index >> x) & 1 for x in range(N)], dtype=np.int8)


def exact_generator(spec: ModelSpec) -> np.ndarray:
    """Rate matrix over all 2^N configurations (row = from, column = to)."""
    N = spec.ring_size
    if N > MAX_EXACT_RING:
        raise ResourceError(f"exact generator limited to N <= {MAX_EXACT_RING}, got {N}")
    size = 1 << N
    Q = np.zeros((size, size))
    for s in range(size):
        occ = index_state(s, N)
        for x in range(N):
            rate = bond_rate(spec, occ, x)
            if rate:
                y = (x + 1) % N
                Q[s, s ^ (1 << x) ^ (1 << y)] += rate
    Q[np.diag_indices(size)] = -Q.sum(axis=1)
    return Q


def transition_law(spec: ModelSpec, t: float, start) -> np.ndarray:
    """Distribution over configurations at time t from a fixed start."""
    Q = exact_generator(spec)
    p0 = np.zeros(Q.shape[0])
    p0[state_index(start)] = 1.0
    return p0 @ expm(t * Q)


def bernoulli_law(N: int, rho: float) -> np.ndarray:
    counts = np.array([bin(s).count("1") for s in range(1 << N)])
    return rho**counts * (1 - rho) ** (N - counts)
