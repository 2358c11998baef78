"""Local functions stored as exhaustive value tables over a window of site offsets.

Pattern indexing: bit ``j`` of a pattern index is the occupancy at ``window[j]``.
"""

from __future__ import annotations

import json
from collections.abc import Callable, Mapping, Sequence
from fractions import Fraction
from typing import Any

import numpy as np

from ..errors import InputError

MAX_WINDOW = 16


def _pattern_bits(index: int, width: int) -> tuple[int, ...]:
    return tuple((index >> j) & 1 for j in range(width))


class LocalFunction:
    """A function of the occupancies at finitely many site offsets.

    Parameters
    ----------
    window : sequence of int
        Distinct site offsets, in the order that defines the pattern bits.
    table : sequence of float
        One value per occupancy pattern, ``2**len(window)`` entries.
    """

    __slots__ = ("window", "table", "_index")

    def __init__(self, window: Sequence[int], table: Sequence[float]):
        window = tuple(int(w) for w in window)
        if len(set(window)) != len(window):
            raise InputError(f"window offsets must be distinct, got {window}")
        if len(window) > MAX_WINDOW:
            raise InputError(f"window has {len(window)} offsets, cap is {MAX_WINDOW}")
        arr = np.asarray(table, dtype=float).reshape(-1).copy()
        if arr.size != 1 << len(window):
            raise InputError(
                f"table length {arr.size} does not match 2^{len(window)} patterns"
            )
        arr.setflags(write=False)
        self.window = window
        self.table = arr
        self._index = {w: j for j, w in enumerate(window)}

    # construction helpers

    @classmethod
    def from_callable(cls, window: Sequence[int], fn: Callable[[Mapping[int, int]], float]):
        """Tabulate ``fn`` which receives a mapping offset -> occupancy."""
        window = tuple(window)
        table = []
        for idx in range(1 << len(window)):
            bits = _pattern_bits(idx, len(window))
            table.append(float(fn(dict(zip(window, bits)))))
        return cls(window, table)

    @classmethod
    def constant(cls, value: float, window: Sequence[int] = ()) -> "LocalFunction":
        return cls(window, np.full(1 << len(tuple(window)), float(value)))

    @classmethod
    def occupation(cls, site: int = 0) -> "LocalFunction":
        return cls((site,), (0.0, 1.0))

    @classmethod
    def product(cls, sites: Sequence[int]) -> "LocalFunction":
        """Indicator that every listed site is occupied."""
        sites = tuple(sites)
        return cls.from_callable(sites, lambda p: float(all(p[s] for s in sites)))

    # evaluation

    def evaluate(self, pattern: Mapping[int, int] | Sequence[int]) -> float:
        """Value on a pattern given as offset -> occupancy or as a window-ordered sequence."""
        return float(self.table[self.pattern_index(pattern)])

    def __call__(self, pattern):
        return self.evaluate(pattern)

    def pattern_index(self, pattern: Mapping[int, int] | Sequence[int]) -> int:
        if isinstance(pattern, Mapping):
            try:
                bits = [pattern[w] for w in self.window]
            except KeyError as exc:
                raise InputError(f"pattern is missing window offset {exc.args[0]}") from None
        else:
            bits = list(pattern)
            if len(bits) != len(self.window):
                raise InputError(
                    f"pattern has {len(bits)} entries, window has {len(self.window)}"
                )
        idx = 0
        for j, b in enumerate(bits):
            if b not in (0, 1, True, False):
                raise InputError(f"occupancy must be 0 or 1, got {b!r}")
            idx |= int(b) << j
        return idx

    def pattern_indices(self, eta: np.ndarray) -> np.ndarray:
        """Pattern index of ``tau_x f`` for every site ``x`` of a periodic configuration."""
        eta = np.asarray(eta, dtype=np.int64)
        idx = np.zeros(eta.size, dtype=np.int64)
        for j, w in enumerate(self.window):
            idx |= np.roll(eta, -w) << j
        return idx

    def field(self, eta: np.ndarray) -> np.ndarray:
        """Array of ``tau_x f(eta)`` over all ring sites ``x``."""
        return self.table[self.pattern_indices(eta)]

    def at(self, eta: np.ndarray, x: int) -> float:
        n = len(eta)
        return self.evaluate([int(eta[(x + w) % n]) for w in self.window])

    # structure

    @property
    def size(self) -> int:
        return len(self.window)

    def patterns(self):
        """Iterate over (index, bits) for every pattern."""
        for idx in range(1 << self.size):
            yield idx, _pattern_bits(idx, self.size)

    def shift(self, k: int) -> "LocalFunction":
        """The translate ``tau_k f``, i.e. ``eta -> f(eta(. + k))``; window offsets move by ``k``."""
        return LocalFunction(tuple(w + k for w in self.window), self.table)

    def normalized(self) -> tuple["LocalFunction", int]:
        """Translate so the smallest offset is 1 and sort the window.

        Returns the translated function and the shift that was applied.
        """
        if not self.window:
            return self, 0
        k = 1 - min(self.window)
        return self.shift(k).reorder(sorted(w + k for w in self.window)), k

    def reorder(self, window: Sequence[int]) -> "LocalFunction":
        """Same function with its window extended and/or permuted to ``window``.

        ``window`` must contain every current offset; extra offsets are dummies.
        """
        window = tuple(window)
        missing = set(self.window) - set(window)
        if missing:
            raise InputError(f"new window lacks offsets {sorted(missing)}")
        pos = [window.index(w) for w in self.window]
        table = np.empty(1 << len(window))
        for idx in range(1 << len(window)):
            sub = 0
            for j, p in enumerate(pos):
                sub |= ((idx >> p) & 1) << j
            table[idx] = self.table[sub]
        return LocalFunction(window, table)

    def depends_on(self, offset: int) -> bool:
        """Whether flipping ``offset`` ever changes the value."""
        if offset not in self._index:
            return False
        j = self._index[offset]
        t = self.table
        idx = np.arange(t.size)
        return bool(np.any(t[idx] != t[idx ^ (1 << j)]))

    def pruned(self) -> "LocalFunction":
        """Drop offsets the value does not depend on."""
        keep = [w for w in self.window if self.depends_on(w)]
        if len(keep) == len(self.window):
            return self
        table = np.empty(1 << len(keep))
        for idx in range(1 << len(keep)):
            pat = {w: 0 for w in self.window}
            for j, w in enumerate(keep):
                pat[w] = (idx >> j) & 1
            table[idx] = self.evaluate(pat)
        return LocalFunction(keep, table)

    # algebra

    def _binary(self, other, op) -> "LocalFunction":
        if not isinstance(other, LocalFunction):
            other = LocalFunction.constant(float(other))
        window = tuple(self.window) + tuple(w for w in other.window if w not in self._index)
        a = self.reorder(window).table
        b = other.reorder(window).table
        return LocalFunction(window, op(a, b))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return LocalFunction(self.window, -self.table)

    def exact_table(self) -> list[Fraction]:
        """Table entries as exact rationals (binary floats convert exactly)."""
        return [Fraction(float(v)) for v in self.table]

    def equals(self, other: "LocalFunction", tol: float = 0.0) -> bool:
        window = tuple(self.window) + tuple(w for w in other.window if w not in self._index)
        a = self.reorder(window).table
        b = other.reorder(window).table
        return bool(np.all(np.abs(a - b) <= tol))

    # serialization

    def to_dict(self) -> dict[str, Any]:
        return {"window": list(self.window), "table": [float(v) for v in self.table]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "LocalFunction":
        try:
            return cls(data["window"], data["table"])
        except KeyError as exc:
            raise InputError(f"local function document lacks {exc.args[0]!r}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "LocalFunction":
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        return f"LocalFunction(window={self.window}, table={self.table.tolist()})"
