"""Discrete calculus on the scaled lattice and the ring embedding of test functions."""

from __future__ import annotations

import numpy as np

from ..lattice.model import ModelSpec
from .testfunctions import TestFunction


def grad_n(u: TestFunction, n: int, x) -> np.ndarray:
    """n (u((x+1)/n) - u(x/n)) at integer sites x."""
    x = np.asarray(x, float)
    return n * (u.value((x + 1) / n) - u.value(x / n))


def lap_n(u: TestFunction, n: int, x) -> np.ndarray:
    """n^2 (u((x+1)/n) + u((x-1)/n) - 2 u(x/n)) at integer sites x."""
    x = np.asarray(x, float)
    return n * n * (u.value((x + 1) / n) + u.value((x - 1) / n) - 2 * u.value(x / n))


def energy_n(u: TestFunction, n: int, radius: float | None = None) -> float:
    """(1/n) sum over sites of (grad_n u)^2, summed over |x/n| <= radius."""
    r = u.support_radius if radius is None else radius
    x = np.arange(-int(np.ceil(r * n)), int(np.ceil(r * n)) + 1)
    return float(np.sum(grad_n(u, n, x) ** 2) / n)


def ring_sites(spec: ModelSpec) -> np.ndarray:
    """Lattice coordinate of each ring index; index N/2 is the origin."""
    return np.arange(spec.ring_size) - spec.ring_size // 2


def ring_positions(spec: ModelSpec, shift: float = 0.0) -> np.ndarray:
    """Macroscopic position of each ring index, optionally moved by ``shift`` sites, wrapped."""
    N = spec.ring_size
    x = ring_sites(spec) - shift
    x = (x + N // 2) % N - N // 2
    return x / spec.scale


def ring_vector(u: TestFunction, spec: ModelSpec, shift: float = 0.0) -> np.ndarray:
    return np.asarray(u.value(ring_positions(spec, shift)), dtype=float)


def ring_grad(vec: np.ndarray, n: int) -> np.ndarray:
    """Periodic forward difference n (v[i+1] - v[i])."""
    return n * (np.roll(vec, -1) - vec)


def ring_lap(vec: np.ndarray, n: int) -> np.ndarray:
    return n * n * (np.roll(vec, -1) + np.roll(vec, 1) - 2 * vec)


def ring_energy(vec: np.ndarray, n: int) -> float:
    return float(np.sum(ring_grad(vec, n) ** 2) / n)


def origin_index(spec: ModelSpec) -> int:
    return spec.ring_size // 2
