"""Model parameterization, structural checks and the exact gradient solver."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt
from typing import Any, Mapping, Sequence

import numpy as np

from ..errors import InputError, ModelError, NotGradientError
from .local import LocalFunction
from .thermo import ThermoPolynomial, compressibility, grand_canonical


@dataclass(frozen=True)
class ModelSpec:
    """Full parameterization of one weakly asymmetric speed-change process on a ring.

    ``rate`` is the speed-change function r, ``asymmetry`` the drift strength a,
    ``scale`` the diffusive scale n, ``density`` the Bernoulli parameter,
    ``ring_size`` the number of sites N and ``horizon`` the macroscopic time T.
    """

    rate: LocalFunction = field(default_factory=lambda: LocalFunction.constant(1.0))
    asymmetry: float = 0.0
    scale: int = 64
    density: float = 0.5
    ring_size: int | None = None
    horizon: float = 1.0

    def __post_init__(self):
        n = int(self.scale)
        if n < 1 or n != self.scale:
            raise InputError(f"scale must be a positive integer, got {self.scale}")
        object.__setattr__(self, "scale", n)
        if self.ring_size is None:
            object.__setattr__(self, "ring_size", 32 * n)
        N = int(self.ring_size)
        object.__setattr__(self, "ring_size", N)
        if N < 2 or N % n:
            raise InputError(f"ring size {N} must be a positive multiple of n={n}")
        if not 0.0 <= self.density <= 1.0:
            raise InputError(f"density must lie in [0, 1], got {self.density}")
        if self.horizon < 0:
            raise InputError("horizon must be nonnegative")
        if np.any(self.rate.table <= 0):
            raise ModelError("rate function must be strictly positive on every pattern")
        if self.asymmetry < 0 and n < self.asymmetry**2:
            raise ModelError(
                f"negative asymmetry a={self.asymmetry} needs n >= a^2, got n={n}"
            )
        span = rate_reach(self.rate)
        if N < span[1] - span[0] + 3:
            raise InputError(f"ring of {N} sites is too small for the rate window")

    @property
    def ellipticity(self) -> float:
        t = self.rate.table
        return float(min(t.min(), (1.0 / t).min()))

    @property
    def drift(self) -> float:
        """The per-jump asymmetry a / sqrt(n)."""
        return self.asymmetry / sqrt(self.scale)

    def to_dict(self) -> dict[str, Any]:
        return {
            "rate": self.rate.to_dict(),
            "asymmetry": float(self.asymmetry),
            "scale": self.scale,
            "density": float(self.density),
            "ring_size": self.ring_size,
            "horizon": float(self.horizon),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ModelSpec":
        data = dict(data)
        if "rate" in data:
            data["rate"] = LocalFunction.from_dict(data["rate"])
        return cls(**data)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def replace(self, **changes) -> "ModelSpec":
        d = self.to_dict()
        d["rate"] = self.rate
        d.update(changes)
        return ModelSpec(**d)


def rate_reach(rate: LocalFunction) -> tuple[int, int]:
    """Smallest and largest offset read by a bond rate (the pair {0, 1} included)."""
    offsets = set(rate.window) | {0, 1}
    return min(offsets), max(offsets)


@dataclass(frozen=True)
class ConditionReport:
    ellipticity: float
    reversible: bool
    finite_range: bool
    window_size: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "ellipticity": self.ellipticity,
            "reversible": self.reversible,
            "finite_range": self.finite_range,
            "window_size": self.window_size,
        }


def verify_conditions(spec_or_rate: ModelSpec | LocalFunction) -> ConditionReport:
    """Ellipticity constant, reversibility and range of the rate function.

    Reversibility holds when the rate never depends on the pair being exchanged,
    i.e. flipping site 0 or site 1 leaves it unchanged.
    """
    rate = spec_or_rate.rate if isinstance(spec_or_rate, ModelSpec) else spec_or_rate
    t = rate.table
    if np.any(t <= 0):
        raise ModelError("rate function is not strictly positive")
    eps0 = float(min(t.min(), (1.0 / t).min()))
    reversible = not (rate.depends_on(0) or rate.depends_on(1))
    return ConditionReport(eps0, reversible, True, rate.size)


# exact linear algebra over the rationals

def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction], ncols: int):
    """Solve ``rows @ x = rhs`` exactly; free variables are set to zero.

    Pivots are chosen from the highest column down so the lowest pattern
    indices (starting with the all-empty pattern) are the free ones.
    Returns ``None`` when the system is inconsistent.
    """
    m = [r[:] + [b] for r, b in zip(rows, rhs)]
    pivots: list[tuple[int, int]] = []
    row = 0
    for col in range(ncols - 1, -1, -1):
        sel = next((i for i in range(row, len(m)) if m[i][col] != 0), None)
        if sel is None:
            continue
        m[row], m[sel] = m[sel], m[row]
        p = m[row][col]
        m[row] = [v / p for v in m[row]]
        for i in range(len(m)):
            if i != row and m[i][col] != 0:
                c = m[i][col]
                m[i] = [a - c * b for a, b in zip(m[i], m[row])]
        pivots.append((row, col))
        row += 1
        if row == len(m):
            break
    for i in range(row, len(m)):
        if m[i][ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for r, c in pivots:
        x[c] = m[r][ncols]
    return x


def verify_gradient(rate: LocalFunction, search_window: Sequence[int]) -> LocalFunction:
    """Find omega on ``search_window`` with r(eta)(eta(1) - eta(0)) = tau_1 omega - omega.

    The identity is imposed on every pattern of the joint support and solved
    exactly. Raises :class:`NotGradientError` if no solution exists there.
    """
    window = tuple(int(w) for w in search_window)
    if not window:
        raise InputError("search window must be nonempty")
    joint = sorted(set(rate.window) | {0, 1} | set(window) | {w + 1 for w in window})
    pos = {s: i for i, s in enumerate(joint)}
    r_exact = rate.exact_table()
    nunk = 1 << len(window)
    rows, rhs = [], []
    for idx in range(1 << len(joint)):
        occ = {s: (idx >> pos[s]) & 1 for s in joint}
        ridx = sum(occ[w] << j for j, w in enumerate(rate.window))
        here = sum(occ[w] << j for j, w in enumerate(window))
        shifted = sum(occ[w + 1] << j for j, w in enumerate(window))
        row = [Fraction(0)] * nunk
        row[shifted] += 1
        row[here] -= 1
        rows.append(row)
        rhs.append(r_exact[ridx] * (occ[1] - occ[0]))
    sol = _solve_exact(rows, rhs, nunk)
    if sol is None:
        raise NotGradientError(f"not gradient on window {list(window)}")
    return LocalFunction(window, [float(v) for v in sol])


def check_gradient_identity(rate: LocalFunction, omega: LocalFunction, tol: float = 0.0) -> bool:
    """Verify the gradient identity on every pattern of the joint support."""
    joint = sorted(set(rate.window) | {0, 1} | set(omega.window) | {w + 1 for w in omega.window})
    for idx in range(1 << len(joint)):
        occ = {s: (idx >> i) & 1 for i, s in enumerate(joint)}
        lhs = rate.evaluate(occ) * (occ[1] - occ[0])
        rhs = omega.evaluate({w: occ[w + 1] for w in omega.window}) - omega.evaluate(occ)
        if abs(lhs - rhs) > tol:
            return False
    return True


# local functions attached to the model

def exchange_current(spec: ModelSpec) -> LocalFunction:
    """Expected instantaneous current across bond (0, 1) per unit microscopic time.

    Right jumps happen at rate r * eta(0)(1 - eta(1)), left jumps at
    r * (1 + a/sqrt(n)) * eta(1)(1 - eta(0)).
    """
    boost = 1.0 + spec.drift
    j = LocalFunction.from_callable(
        (0, 1), lambda p: p[0] * (1 - p[1]) - boost * p[1] * (1 - p[0])
    )
    return spec.rate * j


def exchange_activity(spec: ModelSpec) -> LocalFunction:
    """Total jump rate across bond (0, 1): the quadratic-variation density."""
    boost = 1.0 + spec.drift
    z = LocalFunction.from_callable(
        (0, 1), lambda p: p[0] * (1 - p[1]) + boost * p[1] * (1 - p[0])
    )
    return spec.rate * z


@dataclass(frozen=True)
class Thermodynamics:
    """Exact macroscopic coefficients of a gradient model."""

    omega: LocalFunction
    omega_poly: ThermoPolynomial
    diffusivity: ThermoPolynomial
    compressibility: ThermoPolynomial
    flux: ThermoPolynomial


def thermodynamics(spec: ModelSpec, omega: LocalFunction | None = None,
                   search_window: Sequence[int] | None = None) -> Thermodynamics:
    """D = d/dsigma E[omega], chi = sigma(1 - sigma), H = a chi D."""
    if omega is None:
        if search_window is None:
            lo, hi = rate_reach(spec.rate)
            search_window = list(range(lo, hi))
        omega = verify_gradient(spec.rate, search_window)
    phi = grand_canonical(omega)
    d = phi.derivative()
    chi = compressibility()
    flux = Fraction(float(spec.asymmetry)) * chi * d
    return Thermodynamics(omega, phi, d, chi, flux)


def drift_function(spec: ModelSpec, thermo: Thermodynamics | None = None) -> LocalFunction:
    """a r eta(1)(1 - eta(0)) - a D(rho) chi(rho): the integrand of the nonlinear field."""
    thermo = thermo or thermodynamics(spec)
    a = float(spec.asymmetry)
    rho = float(spec.density)
    base = LocalFunction.from_callable((0, 1), lambda p: a * p[1] * (1 - p[0]))
    centre = a * thermo.diffusivity(rho) * rho * (1 - rho)
    return spec.rate * base - centre
