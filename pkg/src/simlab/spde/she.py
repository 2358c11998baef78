"""Explicit finite-difference solver for the multiplicative stochastic heat equation and the Cole-Hopf map."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError, PositivityLossError
from ..fields.testfunctions import TestFunction


@dataclass
class SHEGrid:
    """Replicated grid field z on a torus of ``length``, with ``z[r, i]`` at x_i = -L/2 + i dx.

    Solves dz = D Lap z dt + lam sqrt(2 chi / D) z dB with space-time white noise.
    """

    z: np.ndarray
    dx: float
    length: float
    diffusivity: float = 1.0
    coupling: float = 1.0
    compressibility: float = 0.25
    dt: float | None = None
    time: float = 0.0
    steps: int = field(default=0)

    def __post_init__(self):
        self.z = np.atleast_2d(np.asarray(self.z, float))
        m = self.z.shape[1]
        if abs(m * self.dx - self.length) > 1e-9 * self.length:
            raise InputError("grid points times spacing must equal the torus length")
        limit = self.dx**2 / (4 * self.diffusivity)
        if self.dt is None:
            self.dt = limit
        if self.dt > limit * (1 + 1e-12):
            raise InputError(f"dt={self.dt} exceeds the stability bound dx^2/(4D)={limit}")

    @property
    def points(self) -> np.ndarray:
        m = self.z.shape[1]
        return -self.length / 2 + self.dx * np.arange(m)

    @property
    def noise_strength(self) -> float:
        return self.coupling * np.sqrt(2 * self.compressibility / self.diffusivity)

    @property
    def exponent(self) -> float:
        """gamma = lam / D, the factor in z = exp(gamma h)."""
        return self.coupling / self.diffusivity


def she_step(grid: SHEGrid, rng: np.random.Generator) -> SHEGrid:
    """One explicit Euler-Maruyama step, in place."""
    z = grid.z
    lap = (np.roll(z, -1, axis=1) + np.roll(z, 1, axis=1) - 2 * z) / grid.dx**2
    xi = rng.standard_normal(z.shape)
    z += grid.dt * grid.diffusivity * lap + z * grid.noise_strength * xi * np.sqrt(grid.dt / grid.dx)
    grid.time += grid.dt
    grid.steps += 1
    if np.any(z <= 0):
        raise PositivityLossError(
            f"z lost positivity at t={grid.time:.4g}; restart with a smaller dt (now {grid.dt:.3g})"
        )
    return grid


def she_evolve(grid: SHEGrid, t_end: float, rng: np.random.Generator) -> SHEGrid:
    """Step until the grid time reaches ``t_end``; the last step is shortened to land on it."""
    full = grid.dt
    while grid.time < t_end - 1e-15:
        grid.dt = min(full, t_end - grid.time)
        she_step(grid, rng)
    grid.dt = full
    return grid


def brownian_profile(rng: np.random.Generator, replicas: int, m: int, dx: float,
                     variance: float) -> np.ndarray:
    """Two-sided Brownian motion with E[B(x)^2] = variance |x|, pinned to 0 at grid index m/2.

    The path is not periodic; its seam sits at the torus edge, far from the
    test-function support.
    """
    inc = rng.standard_normal((replicas, m)) * np.sqrt(variance * dx)
    path = np.cumsum(inc, axis=1)
    return path - path[:, [m // 2]]


def stationary_she(rng: np.random.Generator, replicas: int, dx: float, length: float,
                   diffusivity: float = 1.0, coupling: float = 1.0, compressibility: float = 0.25,
                   dt: float | None = None) -> SHEGrid:
    """z(0) = exp(gamma h0) with h0 Brownian of variance chi per unit length."""
    m = int(round(length / dx))
    h0 = brownian_profile(rng, replicas, m, dx, compressibility)
    gamma = coupling / diffusivity
    return SHEGrid(np.exp(gamma * h0), dx, length, diffusivity, coupling, compressibility, dt)


def cole_hopf_field(grid: SHEGrid, u: TestFunction, a: float | None = None) -> np.ndarray:
    """-(1/a) sum_i u'(x_i) log z_i dx for every replica; ``a`` defaults to gamma."""
    if np.any(grid.z <= 0):
        raise PositivityLossError("Cole-Hopf map needs a positive field")
    a = grid.exponent if a is None else a
    if a == 0:
        raise InputError("Cole-Hopf map needs a nonzero exponent")
    w = np.asarray(u.grad(grid.points), float)
    return -(np.log(grid.z) @ w) * grid.dx / a
