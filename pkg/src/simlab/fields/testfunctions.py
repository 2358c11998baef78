"""Evaluable test functions with exact derivatives.

Names follow a small grammar: ``hermite:3``, ``FM:8``, ``primitive:hermite:2``,
``tabulated:<path>``, ``shift:<d>:<name>`` and ``scale:<c>:<name>``.
"""

from __future__ import annotations

from functools import lru_cache
from math import pi, sqrt

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.special import erf as verf

from ..errors import InputError

_C0 = (2 * pi) ** -0.25


class TestFunction:
    """Base class: subclasses implement value, grad and lap on arrays."""

    __test__ = False  # keep pytest from collecting the class
    name = "test-function"

    def value(self, x):
        raise NotImplementedError

    def grad(self, x):
        raise NotImplementedError

    def lap(self, x):
        raise NotImplementedError

    def primitive(self, x):
        """U(x) = integral of u over (-inf, x]; ``None`` if not available in closed form."""
        return None

    @property
    def mass(self) -> float:
        return float(quad(lambda y: float(self.value(np.array([y]))[0]), -np.inf, np.inf, limit=200)[0])

    @property
    def support_radius(self) -> float:
        """Half-width of the window outside which the function is negligible."""
        return 12.0

    def __call__(self, x):
        return self.value(x)

    def energy(self) -> float:
        """E(u), the integral of the squared derivative over the line."""
        r = self.support_radius + 10
        f = lambda y: float(self.grad(np.array([y]))[0]) ** 2
        return float(quad(f, -r, r, limit=400, points=[0.0])[0])

    def norm2(self) -> float:
        r = self.support_radius + 10
        f = lambda y: float(self.value(np.array([y]))[0]) ** 2
        return float(quad(f, -r, r, limit=400, points=[0.0])[0])

    def shifted(self, d: float) -> "TestFunction":
        return Shifted(self, d)

    def scaled(self, c: float) -> "TestFunction":
        return Scaled(self, c)


def hermite_stack(ell: int, x) -> np.ndarray:
    """Rows her_0 .. her_ell evaluated at x, via the normalized three-term recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.empty((ell + 1,) + x.shape)
    out[0] = _C0 * np.exp(-x * x / 4)
    if ell >= 1:
        out[1] = x * out[0]
    for k in range(1, ell):
        out[k + 1] = (x * out[k] - sqrt(k) * out[k - 1]) / sqrt(k + 1)
    return out


class Hermite(TestFunction):
    """her_l = He_l(x) exp(-x^2/4) / sqrt(l! sqrt(2 pi)), an orthonormal family."""

    def __init__(self, ell: int):
        if ell < 0:
            raise InputError("Hermite index must be nonnegative")
        self.ell = int(ell)
        self.name = f"hermite:{self.ell}"

    def value(self, x):
        return hermite_stack(self.ell, x)[self.ell]

    def grad(self, x):
        l = self.ell
        h = hermite_stack(l + 1, x)
        lower = sqrt(l) * h[l - 1] if l >= 1 else 0.0
        return (lower - sqrt(l + 1) * h[l + 1]) / 2

    def lap(self, x):
        l = self.ell
        h = hermite_stack(l + 2, x)
        lower = sqrt(l * (l - 1)) * h[l - 2] if l >= 2 else 0.0
        return (lower - (2 * l + 1) * h[l] + sqrt((l + 1) * (l + 2)) * h[l + 2]) / 4

    def primitive(self, x):
        x = np.asarray(x, dtype=float)
        h = hermite_stack(max(self.ell - 1, 0), x)
        prev = _C0 * sqrt(pi) * (1 + verf(x / 2))
        if self.ell == 0:
            return prev
        cur = -2 * h[0]
        for k in range(1, self.ell):
            prev, cur = cur, (sqrt(k) * prev - 2 * h[k]) / sqrt(k + 1)
        return cur

    @property
    def mass(self) -> float:
        prev, cur = _C0 * 2 * sqrt(pi), 0.0
        if self.ell == 0:
            return prev
        for k in range(1, self.ell):
            prev, cur = cur, sqrt(k) * prev / sqrt(k + 1)
        return cur

    @property
    def support_radius(self) -> float:
        return 2.0 * sqrt(self.ell + 1) + 10.0

    def energy(self) -> float:
        return (2 * self.ell + 1) / 4


def _bump(y):
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    inside = (y > 0) & (y < 1)
    yi = y[inside]
    out[inside] = np.exp(-1.0 / (yi * (1 - yi)))
    return out


@lru_cache(maxsize=None)
def _bump_mass() -> float:
    return quad(lambda y: float(_bump(np.array([y]))[0]), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)[0]


@lru_cache(maxsize=100_000)
def _bump_tail(x: float) -> float:
    # integral of the bump over (x, 1)
    return quad(lambda y: float(_bump(np.array([y]))[0]), x, 1.0, epsabs=1e-15, epsrel=1e-13)[0]


def cutoff(x):
    """theta: 1 left of 0, 0 right of 1, smooth monotone in between."""
    x = np.asarray(x, dtype=float)
    out = np.where(x <= 0, 1.0, 0.0)
    mid = (x > 0) & (x < 1)
    if np.any(mid):
        z = _bump_mass()
        out[mid] = [_bump_tail(float(v)) / z for v in x[mid]]
    return out


def cutoff_grad(x):
    return -_bump(x) / _bump_mass()


def cutoff_lap(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    mid = (x > 0) & (x < 1)
    y = x[mid]
    out[mid] = -np.exp(-1.0 / (y * (1 - y))) * (1 - 2 * y) / (y * (1 - y)) ** 2 / _bump_mass()
    return out


def logistic(x):
    return 0.5 * (1 + np.tanh(np.asarray(x, dtype=float) / 2))


class CutoffLogistic(TestFunction):
    """F_M(x) = F(x) theta(x / M) with F the logistic function."""

    def __init__(self, M: float):
        if M <= 0:
            raise InputError("cutoff scale must be positive")
        self.M = M
        self.name = f"FM:{M:g}"

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return logistic(x) * cutoff(x / self.M)

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        F = logistic(x)
        dF = F * (1 - F)
        return dF * cutoff(x / self.M) + F * cutoff_grad(x / self.M) / self.M

    def lap(self, x):
        x = np.asarray(x, dtype=float)
        F = logistic(x)
        dF = F * (1 - F)
        d2F = dF * (1 - 2 * F)
        M = self.M
        th = cutoff(x / M)
        return d2F * th + 2 * dF * cutoff_grad(x / M) / M + F * cutoff_lap(x / M) / M**2

    @property
    def support_radius(self) -> float:
        return max(self.M, 30.0)

    def energy(self) -> float:
        f = lambda y: float(self.grad(np.array([y]))[0]) ** 2
        return float(quad(f, -60, 0, limit=400)[0] + quad(f, 0, self.M, limit=400)[0])


def logistic_gap_energy(M: float, M2: float) -> float:
    """E(F_M - F_M2) by quadrature."""
    a, b = CutoffLogistic(M), CutoffLogistic(M2)
    f = lambda y: float(a.grad(np.array([y]))[0] - b.grad(np.array([y]))[0]) ** 2
    hi = max(M, M2)
    return float(quad(f, 0, hi, limit=400, points=[min(M, M2)])[0])


class Primitive(TestFunction):
    """U(x) = integral of ``inner`` over (-inf, x]."""

    def __init__(self, inner: TestFunction):
        if inner.primitive(np.zeros(1)) is None:
            raise InputError(f"{inner.name} has no closed-form primitive")
        self.inner = inner
        self.name = f"primitive:{inner.name}"

    def value(self, x):
        return self.inner.primitive(x)

    def grad(self, x):
        return self.inner.value(x)

    def lap(self, x):
        return self.inner.grad(x)

    @property
    def support_radius(self) -> float:
        return self.inner.support_radius


class Shifted(TestFunction):
    """x -> inner(x - d)."""

    def __init__(self, inner: TestFunction, d: float):
        self.inner, self.d = inner, float(d)
        self.name = f"shift:{self.d:g}:{inner.name}"

    def value(self, x):
        return self.inner.value(np.asarray(x, float) - self.d)

    def grad(self, x):
        return self.inner.grad(np.asarray(x, float) - self.d)

    def lap(self, x):
        return self.inner.lap(np.asarray(x, float) - self.d)

    def primitive(self, x):
        return self.inner.primitive(np.asarray(x, float) - self.d)

    @property
    def mass(self):
        return self.inner.mass

    @property
    def support_radius(self):
        return self.inner.support_radius + abs(self.d)

    def energy(self):
        return self.inner.energy()


class Scaled(TestFunction):
    """x -> c inner(x)."""

    def __init__(self, inner: TestFunction, c: float):
        self.inner, self.c = inner, float(c)
        self.name = f"scale:{self.c:g}:{inner.name}"

    def value(self, x):
        return self.c * self.inner.value(x)

    def grad(self, x):
        return self.c * self.inner.grad(x)

    def lap(self, x):
        return self.c * self.inner.lap(x)

    def primitive(self, x):
        p = self.inner.primitive(x)
        return None if p is None else self.c * p

    @property
    def mass(self):
        return self.c * self.inner.mass

    @property
    def support_radius(self):
        return self.inner.support_radius

    def energy(self):
        return self.c**2 * self.inner.energy()


class Tabulated(TestFunction):
    """Cubic spline through (x, u) samples, zero outside the sampled range."""

    def __init__(self, x, u, name: str = "tabulated"):
        x = np.asarray(x, float)
        u = np.asarray(u, float)
        if x.ndim != 1 or x.shape != u.shape or x.size < 4:
            raise InputError("tabulated test function needs matching 1-d arrays of >= 4 points")
        self.lo, self.hi = float(x[0]), float(x[-1])
        self.spline = CubicSpline(x, u)
        self._d1 = self.spline.derivative(1)
        self._d2 = self.spline.derivative(2)
        self._anti = self.spline.antiderivative()
        self.name = name

    @classmethod
    def from_file(cls, path: str) -> "Tabulated":
        data = np.loadtxt(path, delimiter=None if not path.endswith(".csv") else ",")
        return cls(data[:, 0], data[:, 1], name=f"tabulated:{path}")

    def _masked(self, fn, x):
        x = np.asarray(x, float)
        inside = (x >= self.lo) & (x <= self.hi)
        return np.where(inside, fn(np.clip(x, self.lo, self.hi)), 0.0)

    def value(self, x):
        return self._masked(self.spline, x)

    def grad(self, x):
        return self._masked(self._d1, x)

    def lap(self, x):
        return self._masked(self._d2, x)

    def primitive(self, x):
        x = np.asarray(x, float)
        c = np.clip(x, self.lo, self.hi)
        return self._anti(c) - self._anti(self.lo)

    @property
    def mass(self):
        return float(self._anti(self.hi) - self._anti(self.lo))

    @property
    def support_radius(self):
        return max(abs(self.lo), abs(self.hi))


def parse_test_function(name: str) -> TestFunction:
    """Build a test function from its grammar string."""
    head, _, rest = name.partition(":")
    try:
        if head == "hermite":
            return Hermite(int(rest))
        if head == "FM":
            return CutoffLogistic(float(rest))
        if head == "primitive":
            return Primitive(parse_test_function(rest))
        if head == "tabulated":
            return Tabulated.from_file(rest)
        if head == "shift":
            d, _, inner = rest.partition(":")
            return Shifted(parse_test_function(inner), float(d))
        if head == "scale":
            c, _, inner = rest.partition(":")
            return Scaled(parse_test_function(inner), float(c))
    except (ValueError, OSError) as exc:
        raise InputError(f"cannot build test function {name!r}: {exc}") from None
    raise InputError(f"unknown test function {name!r}")


__all__ = [
    "TestFunction", "Hermite", "CutoffLogistic", "Primitive", "Shifted", "Scaled",
    "Tabulated", "parse_test_function", "hermite_stack", "cutoff", "logistic",
    "logistic_gap_energy",
]
