"""Replica farming: independent simulations reduced in replica-index order."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .dynamics.engine import Simulation
from .lattice.model import ModelSpec


def worker_count() -> int:
    env = os.environ.get("SIMLAB_WORKERS")
    if env:
        return max(1, int(env))
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return max(1, os.cpu_count() or 1)


@dataclass
class Probe:
    """What to record along each replica.

    ``pairings`` maps a name to a ring vector v; the recorded value is
    (1/sqrt n) sum_x (eta(x) - rho) v(x). ``integrands`` are passed to the engine.
    """

    pairings: dict[str, np.ndarray] = field(default_factory=dict)
    integrands: list = field(default_factory=list)
    record_counts: bool = False


def _replica(spec: ModelSpec, seed: int, replica: int, times, probe: Probe, initial=None):
    sim = Simulation(spec, seed, replica, initial=initial, integrands=probe.integrands)
    names = list(probe.pairings)
    V = np.array([probe.pairings[k] for k in names]) if names else np.zeros((0, spec.ring_size))
    out = {k: np.empty(len(times)) for k in names}
    for g in probe.integrands:
        out[g.name] = np.empty(len(times))
    scale = 1.0 / sqrt(spec.scale)
    for i, t in enumerate(times):
        st = sim.advance_to(t)
        if names:
            vals = V @ (st.occupancy - spec.density) * scale
            for k, v in zip(names, vals):
                out[k][i] = v
        for k, v in sim.integrals().items():
            out[k][i] = v
    if probe.record_counts:
        out["_jumps"] = sim.state.jumps.copy()
        out["_currents"] = sim.state.currents.copy()
    return out


def _chunk(args):
    spec, seed, replicas, times, probe = args
    return [_replica(spec, seed, r, times, probe) for r in replicas]


def simulate(spec: ModelSpec, seed: int, replicas: int, times, probe: Probe,
             workers: int | None = None, first: int = 0) -> dict[str, np.ndarray]:
    """Run replicas first..first+replicas-1 and stack each record into a (replicas, times) array."""
    times = [float(t) for t in times]
    idx = list(range(first, first + replicas))
    workers = workers or worker_count()
    if workers <= 1 or replicas < 2:
        results = [_replica(spec, seed, r, times, probe) for r in idx]
    else:
        chunks = [idx[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_chunk, [(spec, seed, c, times, probe) for c in chunks]))
        by_index = {}
        for c, res in zip(chunks, parts):
            by_index.update(zip(c, res))
        results = [by_index[r] for r in idx]
    keys = results[0].keys() if results else []
    return {k: np.stack([res[k] for res in results]) for k in keys}
