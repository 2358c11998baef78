"""Instantaneous fluctuation fields of a lattice configuration."""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from ..dynamics.engine import block_sums, expected_current_rate
from ..dynamics.state import LatticeState
from ..errors import InputError
from ..lattice.model import ModelSpec, exchange_current
from ..lattice.thermo import grand_canonical
from .calculus import origin_index, ring_grad, ring_positions, ring_sites, ring_vector
from .testfunctions import TestFunction


def frame_velocity(spec: ModelSpec) -> float:
    """Speed, in sites per unit macroscopic time, at which density fluctuations travel.

    It is the density derivative of the stationary mean current, so it vanishes
    at densities where the flux is stationary in rho.
    """
    poly = grand_canonical(exchange_current(spec)).derivative()
    return spec.scale**2 * poly(spec.density)


def frame_shift(spec: ModelSpec, t: float) -> float:
    return frame_velocity(spec) * t


def density_field(state: LatticeState, spec: ModelSpec, u: TestFunction | np.ndarray,
                  recentre: bool = True) -> float:
    """(1/sqrt n) sum_x (eta(x) - rho) u(x/n), evaluated in the moving frame."""
    if isinstance(u, TestFunction):
        shift = frame_shift(spec, state.clock) if recentre else 0.0
        u = ring_vector(u, spec, shift)
    return float(np.dot(state.occupancy - spec.density, u) / sqrt(spec.scale))


def current_field(state: LatticeState, spec: ModelSpec, u: TestFunction | np.ndarray) -> float:
    """n^{-3/2} sum_x (J_t(x) - E[J_t(x)]) u(x/n)."""
    if isinstance(u, TestFunction):
        u = ring_vector(u, spec)
    mean = expected_current_rate(spec) * state.clock
    return float(np.dot(state.currents - mean, u) / spec.scale**1.5)


def summation_by_parts_residual(state: LatticeState, initial_occupancy: np.ndarray,
                                spec: ModelSpec, u: TestFunction) -> float:
    """Y_t(u) - Y_0(u) - n^{-3/2} sum_x J_t(x) grad_n u(x); zero up to rounding."""
    vec = ring_vector(u, spec)
    y_t = np.dot(state.occupancy - spec.density, vec) / sqrt(spec.scale)
    y_0 = np.dot(np.asarray(initial_occupancy) - spec.density, vec) / sqrt(spec.scale)
    flux = np.dot(state.currents, ring_grad(vec, spec.scale)) / spec.scale**1.5
    return float(y_t - y_0 - flux)


def _prefix_from_origin(occupancy: np.ndarray, origin: int, lo: int, hi: int) -> np.ndarray:
    """P(x) = sum_{i=1..x} eta(i) for x >= 0 and -sum_{i=x+1..0} eta(i) for x < 0, lattice x in [lo, hi]."""
    N = occupancy.size
    idx = (origin + np.arange(lo, hi + 1)) % N
    c = np.cumsum(occupancy[idx].astype(np.int64))
    # c[j] = sum of eta at lattice lo..lo+j; P(x) = c(x) - c(0)
    zero = -lo
    return c - c[zero]


@dataclass
class HeightProfile:
    """Height function on a window of lattice sites, from both constructions."""

    sites: np.ndarray
    from_initial: np.ndarray  # J_t(x) - sum_{1..x} eta_0
    from_current: np.ndarray  # J_t(0) - sum_{1..x} eta_t
    centred: np.ndarray  # (h - E[J_t] + rho x) / sqrt(n)
    scale: int

    @property
    def positions(self) -> np.ndarray:
        return self.sites / self.scale

    def __call__(self, x):
        """Piecewise-linear interpolation of the centred field at macroscopic points."""
        return np.interp(x, self.positions, self.centred)

    def pair(self, g) -> float:
        """Integral of the centred field against g over the window (trapezoid rule)."""
        vals = self.centred * np.asarray(g.value(self.positions) if hasattr(g, "value") else g)
        return float(np.trapezoid(vals, self.positions))


def height_field(state: LatticeState, initial_occupancy: np.ndarray, spec: ModelSpec,
                 lo: int | None = None, hi: int | None = None) -> HeightProfile:
    """Height function on lattice sites lo..hi (defaults to the whole ring window)."""
    N = spec.ring_size
    lo = -(N // 2) + 1 if lo is None else int(lo)
    hi = N - N // 2 - 1 if hi is None else int(hi)
    if not (-(N // 2) < lo <= 0 <= hi < N - N // 2):
        raise InputError("height window must contain 0 and fit inside the ring")
    o = origin_index(spec)
    sites = np.arange(lo, hi + 1)
    J = state.currents[(o + sites) % N]
    p0 = _prefix_from_origin(np.asarray(initial_occupancy), o, lo, hi)
    pt = _prefix_from_origin(state.occupancy, o, lo, hi)
    h1 = J - p0
    h2 = state.currents[o] - pt
    mean = expected_current_rate(spec) * state.clock
    centred = (h1 - mean + spec.density * sites) / sqrt(spec.scale)
    return HeightProfile(sites, h1, h2, centred, spec.scale)


def block_average(state: LatticeState | np.ndarray, ell: int, x: int = 0) -> float:
    """(1/ell) sum_{i=1..ell} eta(x+i), ring index x."""
    occ = state.occupancy if isinstance(state, LatticeState) else np.asarray(state)
    N = occ.size
    if not 1 <= ell <= N:
        raise InputError("block length must lie in [1, N]")
    return float(occ[(x + 1 + np.arange(ell)) % N].sum() / ell)


def block_quadratic(state, ell: int, rho: float, x: int = 0) -> float:
    """Q_rho(ell) at block x: (eta^ell(x) - rho)^2 - chi(rho)/ell."""
    return (block_average(state, ell, x) - rho) ** 2 - rho * (1 - rho) / ell


def indicator_field(state: LatticeState, spec: ModelSpec, eps: float, x: int = 0) -> float:
    """Y(i_eps(x)) with i_eps(x; y) = 1/eps on x < y/n <= x + eps, x a ring index."""
    n = spec.scale
    ell = int(np.ceil(eps * n - 1e-9))
    if ell < 1:
        raise InputError("eps must be at least 1/n")
    N = spec.ring_size
    y = np.arange(N)
    d = (y - x) % N
    weight = np.where((d >= 1) & (d <= ell), 1.0 / eps, 0.0)
    return float(np.dot(state.occupancy - spec.density, weight) / sqrt(n))


def squared_increment_field(profile: HeightProfile, spec: ModelSpec, eps: float,
                            u: TestFunction) -> float:
    """(1/n) sum_x {((H(x+eps) - H(x))/eps)^2 - chi/eps} u(x), x over the profile window."""
    n = spec.scale
    ell = int(round(eps * n))
    if ell < 1 or abs(ell - eps * n) > 1e-9:
        raise InputError("eps must be a positive multiple of 1/n")
    H = profile.centred
    inc = (H[ell:] - H[:-ell]) / eps
    x = profile.positions[:-ell]
    chi = spec.density * (1 - spec.density)
    return float(np.sum((inc**2 - chi / eps) * u.value(x)) / n)


def block_squares(state: LatticeState, ell: int, rho: float) -> np.ndarray:
    """(eta^ell(y) - rho)^2 for every ring index y."""
    return (block_sums(state.occupancy, ell) / ell - rho) ** 2


__all__ = [
    "frame_velocity", "frame_shift", "density_field", "current_field",
    "summation_by_parts_residual", "height_field", "HeightProfile", "block_average",
    "block_quadratic", "indicator_field", "squared_increment_field", "block_squares",
    "ring_positions", "ring_sites",
]
