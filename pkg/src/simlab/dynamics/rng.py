"""Per-replica counter-based random streams.

Each replica owns a Philox stream keyed by (master seed, replica index), so a
replica's numbers never depend on how replicas are scheduled across workers.
"""

from __future__ import annotations

import numpy as np

from ..errors import InputError

_MASK64 = (1 << 64) - 1


def stream(master_seed: int, replica: int = 0, lane: int = 0) -> np.random.Generator:
    """Generator for one replica. ``lane`` separates independent uses within a replica."""
    if not 0 <= master_seed <= _MASK64:
        raise InputError("master seed must be an unsigned 64-bit integer")
    if replica < 0 or lane < 0:
        raise InputError("replica index and lane must be nonnegative")
    key = (master_seed << 64) | ((lane & 0xFFFF) << 48) | (replica & ((1 << 48) - 1))
    return np.random.Generator(np.random.Philox(key=key))
