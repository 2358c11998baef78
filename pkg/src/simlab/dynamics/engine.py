"""Continuous-time simulation of the accelerated process on a ring."""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError
from ..lattice.local import LocalFunction
from ..lattice.model import ModelSpec, exchange_current, rate_reach
from ..lattice.thermo import grand_canonical
from ..series import FieldSeries
from . import kernel
from .rng import stream
from .state import LatticeState


def bond_rate(spec: ModelSpec, occupancy: np.ndarray, x: int) -> float:
    """n^2 r_x(eta) (1 + a/sqrt(n) eta(x+1)(1 - eta(x))) on an active bond, else 0."""
    occ = np.asarray(occupancy)
    N = occ.size
    a, b = int(occ[x % N]), int(occ[(x + 1) % N])
    if a == b:
        return 0.0
    r = spec.rate.at(occ, x)
    boost = 1.0 + spec.drift * b * (1 - a)
    return spec.scale**2 * r * boost


def sample_initial(spec: ModelSpec, seed: int = 0, replica: int = 0) -> LatticeState:
    """I.i.d. Bernoulli(rho) occupancies, zero currents, clock 0."""
    gen = stream(seed, replica)
    return LatticeState.from_occupancy(_bernoulli(gen, spec))


def _bernoulli(gen: np.random.Generator, spec: ModelSpec) -> np.ndarray:
    return (gen.random(spec.ring_size) < spec.density).astype(np.int8)


@dataclass
class LocalIntegrand:
    """Time integral of sum_y tau_y f(eta_s) w(y)."""

    name: str
    function: LocalFunction
    weights: np.ndarray


@dataclass
class BlockIntegrand:
    """Time integral of sum_y (eta^ell(y) - rho)^2 w(y), blocks covering y+1..y+ell."""

    name: str
    ell: int
    weights: np.ndarray


def _buffer_size(spec: ModelSpec) -> int:
    # deterministic in the ModelSpec alone, so the stream is consumed identically on every run
    expected = spec.ring_size * spec.scale**2 * max(spec.horizon, 1e-3) / 2
    size = 1 << int(np.ceil(np.log2(max(expected, 1.0))))
    return int(min(max(size, 256), 1 << 16))


class Simulation:
    """One replica of the process together with its exact time integrals.

    Parameters
    ----------
    spec : ModelSpec
    seed, replica : int
        Select the random stream.
    initial : array or LatticeState, optional
        Starting configuration. Defaults to a Bernoulli(rho) sample from the stream.
    integrands : sequence of LocalIntegrand or BlockIntegrand
    check_every : int
        Compare every stored bond rate with a fresh recomputation after this many events.
    debug : bool
        Full rate and tree-sum check after every kernel return.
    """

    def __init__(self, spec: ModelSpec, seed: int = 0, replica: int = 0, initial=None,
                 integrands: Sequence = (), check_every: int = 1_000_000, debug: bool = False):
        self.spec = spec
        self.seed, self.replica = seed, replica
        self._gen = stream(seed, replica)
        N = spec.ring_size
        if initial is None:
            state = LatticeState.from_occupancy(_bernoulli(self._gen, spec))
        elif isinstance(initial, LatticeState):
            state = initial.copy()
        else:
            state = LatticeState.from_occupancy(initial)
        if state.ring_size != N:
            raise InputError(f"initial configuration has {state.ring_size} sites, spec has {N}")
        self.state = state
        self.initial_occupancy = state.occupancy.copy()
        self._t_next = 0.0
        self._pending = True
        self.events = 0
        self._since_check = 0
        self.check_every = int(check_every)
        self.debug = debug

        self._rtab = np.ascontiguousarray(spec.rate.table * float(spec.scale**2))
        self._rwin = np.array(spec.rate.window, dtype=np.int64)
        self._boost = 1.0 + spec.drift
        self._reach = rate_reach(spec.rate)
        self._P = 1 << int(np.ceil(np.log2(max(N, 2))))
        self._tree = np.zeros(2 * self._P)
        kernel.build_tree(state.occupancy, N, self._P, self._rtab, self._rwin, self._boost, self._tree)

        self._bufsize = _buffer_size(spec)
        self._E = np.empty(0)
        self._U = np.empty(0)
        self._pos = 0
        self._setup_integrands(integrands)

    # integrand tables

    def _setup_integrands(self, integrands):
        N = self.spec.ring_size
        local = [g for g in integrands if isinstance(g, LocalIntegrand)]
        block = [g for g in integrands if isinstance(g, BlockIntegrand)]
        if len(local) + len(block) != len(integrands):
            raise InputError("integrands must be LocalIntegrand or BlockIntegrand")
        names = [g.name for g in integrands]
        if len(set(names)) != len(names):
            raise InputError("integrand names must be unique")
        self._local, self._block = local, block
        K = len(local)
        wmax = max([g.function.size for g in local] + [1])
        tmax = max([g.function.table.size for g in local] + [1])
        self._lwin = np.zeros((K, wmax), np.int64)
        self._lwlen = np.zeros(K, np.int64)
        self._lmin = np.zeros(K, np.int64)
        self._lmax = np.zeros(K, np.int64)
        self._ltab = np.zeros((K, tmax))
        self._lw = np.zeros((K, N))
        for k, g in enumerate(local):
            f = g.function
            self._lwin[k, : f.size] = f.window
            self._lwlen[k] = f.size
            self._lmin[k] = min(f.window) if f.window else 0
            self._lmax[k] = max(f.window) if f.window else 0
            self._ltab[k, : f.table.size] = f.table
            self._lw[k] = _weights(g.weights, N)
        self._lval = np.zeros(K)
        self._lacc = np.zeros(K)
        B = len(block)
        self._bell = np.array([g.ell for g in block], dtype=np.int64)
        if B and (self._bell.min() < 1 or self._bell.max() >= N):
            raise InputError("block length must lie in [1, N)")
        self._bw = np.zeros((B, N))
        for k, g in enumerate(block):
            self._bw[k] = _weights(g.weights, N)
        self._bsum = np.zeros((B, N), np.int64)
        self._bval = np.zeros(B)
        self._bacc = np.zeros(B)

    def _refresh_integrand_values(self):
        occ = self.state.occupancy
        for k, g in enumerate(self._local):
            self._lval[k] = float(np.dot(g.function.field(occ), self._lw[k]))
        rho = self.spec.density
        for k, ell in enumerate(self._bell):
            s = block_sums(occ, int(ell))
            self._bsum[k] = s
            self._bval[k] = float(np.dot((s / ell - rho) ** 2, self._bw[k]))

    def integrals(self) -> dict[str, float]:
        out = {g.name: float(v) for g, v in zip(self._local, self._lacc)}
        out.update({g.name: float(v) for g, v in zip(self._block, self._bacc)})
        return out

    # stepping

    def _refill(self):
        self._E = self._gen.standard_exponential(self._bufsize)
        self._U = self._gen.random(self._bufsize)
        self._pos = 0

    def advance_to(self, t: float) -> LatticeState:
        """Run until macroscopic time ``t``; the state is left frozen at ``t``."""
        st = self.state
        if t < st.clock:
            raise InputError(f"cannot advance backwards from {st.clock} to {t}")
        self._refresh_integrand_values()
        while True:
            cap = max(self.check_every - self._since_check, 1)
            (st.clock, self._t_next, self._pending, self._pos, status, nev) = kernel.advance(
                st.occupancy, st.currents, st.jumps, self._tree, self._P,
                self._rtab, self._rwin, self._boost, self._reach[0], self._reach[1],
                st.clock, self._t_next, self._pending, float(t), self._E, self._U, self._pos, cap,
                self._lwin, self._lwlen, self._lmin, self._lmax, self._ltab, self._lw,
                self._lval, self._lacc,
                self._bell, self._bsum, self._bw, self._bval, self._bacc, float(self.spec.density),
            )
            self.events += nev
            self._since_check += nev
            if self.debug:
                self.check_rates(full=True)
            if self._since_check >= self.check_every:
                self.check_rates()
                self._since_check = 0
            if status == kernel.REACHED:
                return st
            if status == kernel.NEED_RANDOMS:
                self._refill()

    def check_rates(self, full: bool = False) -> None:
        """Assert that every stored bond rate equals the formula recomputed from scratch."""
        fresh = kernel.all_rates(self.state.occupancy, self._rtab, self._rwin, self._boost)
        leaves = self._tree[self._P : self._P + self.spec.ring_size]
        if not np.array_equal(fresh, leaves):
            bad = int(np.flatnonzero(fresh != leaves)[0])
            raise AssertionError(f"stored rate of bond {bad} is stale")
        if full:
            total = fresh.sum()
            if abs(self._tree[1] - total) > 1e-9 * max(total, 1.0):
                raise AssertionError("sum tree root disagrees with the bond rates")

    @property
    def total_rate(self) -> float:
        return float(self._tree[1])


def _weights(w, N):
    w = np.asarray(w, dtype=float)
    if w.shape != (N,):
        raise InputError(f"weights must have shape ({N},)")
    return np.ascontiguousarray(w)


def block_sums(occupancy: np.ndarray, ell: int) -> np.ndarray:
    """S(y) = sum_{i=1..ell} eta(y+i) for every y (periodic)."""
    occ = np.asarray(occupancy, np.int64)
    ext = np.concatenate([occ, occ[:ell]])
    c = np.concatenate([[0], np.cumsum(ext)])
    y = np.arange(occ.size)
    return c[y + ell + 1] - c[y + 1]


Observer = Callable[[LatticeState], float]


@dataclass
class RunResult:
    series: dict[str, FieldSeries]
    state: LatticeState
    initial_occupancy: np.ndarray
    events: int = 0
    extras: dict = field(default_factory=dict)


def run(spec: ModelSpec, seed: int = 0, sample_times: Sequence[float] = (),
        observers: Mapping[str, Observer] | None = None, integrands: Sequence = (),
        initial=None, replica: int = 0, on_sample: Callable | None = None) -> RunResult:
    """Simulate one replica and record observers and time integrals at ``sample_times``.

    Observers receive the frozen state. ``on_sample(sim, t)`` is an optional hook
    for callers needing the full simulation object at each sample time.
    """
    times = [float(t) for t in sample_times]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise InputError("sample times must be strictly increasing")
    if times and (times[0] < 0 or times[-1] > spec.horizon + 1e-12):
        raise InputError("sample times must lie in [0, T]")
    sim = Simulation(spec, seed, replica, initial, integrands)
    observers = dict(observers or {})
    digest = spec.digest()
    series = {name: FieldSeries(name, replica, digest) for name in observers}
    for g in integrands:
        series[g.name] = FieldSeries(g.name, replica, digest)
    for t in times:
        sim.advance_to(t)
        for name, obs in observers.items():
            series[name].append(t, obs(sim.state))
        for name, v in sim.integrals().items():
            series[name].append(t, v)
        if on_sample is not None:
            on_sample(sim, t)
    return RunResult(series, sim.state, sim.initial_occupancy, sim.events)


def expected_current_rate(spec: ModelSpec) -> float:
    """Mean of J_t(x) per unit macroscopic time under the stationary Bernoulli measure."""
    return spec.scale**2 * grand_canonical(exchange_current(spec))(spec.density)


__all__ = [
    "bond_rate", "sample_initial", "Simulation", "LocalIntegrand", "BlockIntegrand",
    "run", "RunResult", "block_sums", "expected_current_rate",
]
