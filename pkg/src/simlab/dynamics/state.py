"""Microscopic configuration with exact current bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import groupby

import numpy as np

from ..errors import InputError


@dataclass
class LatticeState:
    """Occupancies of a periodic ring, signed crossing counts per bond and the clock.

    ``currents[x]`` counts right jumps minus left jumps across bond (x, x+1);
    ``jumps[x]`` counts all crossings of that bond.
    """

    occupancy: np.ndarray
    currents: np.ndarray
    jumps: np.ndarray
    clock: float = 0.0

    @classmethod
    def from_occupancy(cls, occupancy) -> "LatticeState":
        occ = np.asarray(occupancy)
        if occ.ndim != 1 or not np.isin(occ, (0, 1)).all():
            raise InputError("occupancy must be a 1-d array of zeros and ones")
        occ = occ.astype(np.int8)
        n = occ.size
        return cls(occ, np.zeros(n, np.int64), np.zeros(n, np.int64), 0.0)

    @property
    def ring_size(self) -> int:
        return self.occupancy.size

    @property
    def particle_count(self) -> int:
        return int(self.occupancy.sum(dtype=np.int64))

    def copy(self) -> "LatticeState":
        return LatticeState(self.occupancy.copy(), self.currents.copy(), self.jumps.copy(), self.clock)

    def continuity_defect(self, initial_occupancy) -> np.ndarray:
        """eta_t(x) - eta_0(x) - (J(x-1) - J(x)) for every site; identically zero."""
        d = self.occupancy.astype(np.int64) - np.asarray(initial_occupancy, np.int64)
        return d - (np.roll(self.currents, 1) - self.currents)

    def right_left_counts(self) -> tuple[np.ndarray, np.ndarray]:
        right = (self.jumps + self.currents) // 2
        return right, self.jumps - right

    def snapshot(self) -> str:
        """Run-length encoding such as ``"3x1,2x0"``."""
        return ",".join(f"{len(list(g))}x{k}" for k, g in groupby(self.occupancy.tolist()))

    @staticmethod
    def decode_snapshot(text: str) -> np.ndarray:
        parts = []
        for chunk in text.split(","):
            count, bit = chunk.split("x")
            parts.extend([int(bit)] * int(count))
        return np.array(parts, dtype=np.int8)
