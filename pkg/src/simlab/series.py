"""Time-stamped scalar samples and their JSON-lines encoding."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import InputError


@dataclass
class FieldSeries:
    """Samples of one named scalar functional along one replica."""

    name: str
    replica: int = 0
    spec_hash: str = ""
    test_function: str | None = None
    times: list[float] = field(default_factory=list)
    values: list[float] = field(default_factory=list)

    def append(self, t: float, value: float) -> None:
        if self.times and t <= self.times[-1]:
            raise InputError(f"sample time {t} is not after {self.times[-1]}")
        if t < 0:
            raise InputError("sample times must be nonnegative")
        self.times.append(float(t))
        self.values.append(float(value))

    def at(self, t: float) -> float:
        return self.values[self.times.index(float(t))]

    @property
    def last(self) -> float:
        return self.values[-1]

    def records(self) -> Iterator[dict]:
        for t, v in zip(self.times, self.values):
            yield {"replica": self.replica, "t": t, "name": self.name, "value": v}


def write_jsonl(series: Iterable[FieldSeries], fh) -> None:
    for s in series:
        for rec in s.records():
            fh.write(json.dumps(rec) + "\n")


def read_jsonl(fh) -> dict[tuple[int, str], FieldSeries]:
    out: dict[tuple[int, str], FieldSeries] = {}
    for line in fh:
        if not line.strip():
            continue
        rec = json.loads(line)
        key = (rec["replica"], rec["name"])
        s = out.setdefault(key, FieldSeries(rec["name"], rec["replica"]))
        s.append(rec["t"], rec["value"])
    return out
