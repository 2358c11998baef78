"""Exact spectral sampler for the Ornstein-Uhlenbeck field on a torus.

Modes are e_j(x) = exp(i k_j x) / sqrt(L) with k_j = 2 pi j / L on [-L/2, L/2).
Only j >= 0 is stored; negative modes are complex conjugates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from ..fields.testfunctions import TestFunction


def torus_coefficients(u: TestFunction, L: float, modes: int, points: int | None = None) -> np.ndarray:
    """u_j = <u, e_j> for j = 0..modes, via the periodic rectangle rule."""
    m = points or max(8 * modes, 4096)
    x = -L / 2 + L * np.arange(m) / m
    vals = np.asarray(u.value(x), float)
    j = np.arange(modes + 1)
    k = 2 * np.pi * j / L
    phase = np.exp(-1j * np.outer(k, x))
    return (phase @ vals) * (L / m) / np.sqrt(L)


@dataclass
class SpectralOU:
    """dY = D Lap Y dt + sqrt(2 chi D) grad dB on a torus of length ``length``."""

    length: float
    modes: int
    diffusivity: float = 1.0
    compressibility: float = 0.25

    def __post_init__(self):
        if self.modes < 1 or self.length <= 0:
            raise InputError("need at least one mode and a positive torus length")
        self.k = 2 * np.pi * np.arange(self.modes + 1) / self.length

    def sample_stationary(self, rng: np.random.Generator, replicas: int) -> np.ndarray:
        """White noise of variance chi: every mode has E|Y_j|^2 = chi, mode 0 real."""
        chi = self.compressibility
        z = (rng.standard_normal((replicas, self.modes + 1))
             + 1j * rng.standard_normal((replicas, self.modes + 1))) * np.sqrt(chi / 2)
        z[:, 0] = rng.standard_normal(replicas) * np.sqrt(chi)
        return z

    def step(self, Y: np.ndarray, dt: float, rng: np.random.Generator) -> np.ndarray:
        """Exact transition over dt; mode 0 is conserved."""
        if dt <= 0:
            raise InputError("dt must be positive")
        decay = np.exp(-self.diffusivity * self.k**2 * dt)
        sd = np.sqrt(self.compressibility * (1 - decay**2) / 2)
        noise = (rng.standard_normal(Y.shape) + 1j * rng.standard_normal(Y.shape)) * sd
        noise[:, 0] = 0.0
        return Y * decay + noise

    def pair(self, Y: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
        """Y(u) = sum over all j of Y_j conj(u_j), using conjugate symmetry."""
        return (Y[:, 0] * np.conj(coeffs[0])).real + 2 * (Y[:, 1:] @ np.conj(coeffs[1:])).real

    def autocovariance(self, coeffs: np.ndarray, t: float) -> float:
        """chi <u, exp(t D Lap) u> restricted to the resolved modes."""
        w = np.abs(coeffs) ** 2 * np.exp(-self.diffusivity * self.k**2 * t)
        return float(self.compressibility * (w[0] + 2 * w[1:].sum()))


def ou_step(ou: SpectralOU, Y: np.ndarray, dt: float, rng: np.random.Generator) -> np.ndarray:
    return ou.step(Y, dt, rng)


def line_autocovariance_hermite0(chi: float, D: float, t: float) -> float:
    """chi <her_0, exp(t D Lap) her_0> on the whole line: chi / sqrt(1 + D t / 2)."""
    return chi / np.sqrt(1 + D * t / 2)
