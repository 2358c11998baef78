"""Canonical-ensemble oracle and equivalence-of-ensembles diagnostics, in exact arithmetic."""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction
from math import comb

import numpy as np

from ..errors import InputError
from .local import LocalFunction
from .thermo import ThermoPolynomial, compressibility, grand_canonical


def _support_counts(f: LocalFunction) -> tuple[int, list[Fraction]]:
    """Normalize the support to {1..l0} and total the table by particle count."""
    g, _ = f.normalized()
    l0 = max(g.window) if g.window else 0
    g = g.reorder(range(1, l0 + 1)) if l0 else g
    by_count = [Fraction(0)] * (l0 + 1)
    for (idx, bits), value in zip(g.patterns(), g.exact_table()):
        by_count[sum(bits)] += value
    return l0, by_count


def canonical_expectation_exact(f: LocalFunction, ell: int, k: int) -> Fraction:
    """E[f | k particles in {1..ell}] under the uniform canonical measure."""
    l0, by_count = _support_counts(f)
    if ell < l0:
        raise InputError(f"box size {ell} is smaller than the support size {l0}")
    if not 0 <= k <= ell:
        raise InputError(f"particle number {k} outside [0, {ell}]")
    total = Fraction(0)
    rest = ell - l0
    for m, weight in enumerate(by_count):
        if weight and 0 <= k - m <= rest:
            total += weight * comb(rest, k - m)
    return total / comb(ell, k)


def canonical_expectation(f: LocalFunction, ell: int, k: int) -> float:
    return float(canonical_expectation_exact(f, ell, k))


def canonical_table(f: LocalFunction, ell: int) -> list[Fraction]:
    """psi_f(ell, k) for k = 0..ell."""
    l0, by_count = _support_counts(f)
    if ell < l0:
        raise InputError(f"box size {ell} is smaller than the support size {l0}")
    rest = ell - l0
    out = []
    for k in range(ell + 1):
        total = Fraction(0)
        for m, weight in enumerate(by_count):
            if weight and 0 <= k - m <= rest:
                total += weight * comb(rest, k - m)
        out.append(total / comb(ell, k))
    return out


def eoe_expansion_residual(f: LocalFunction, ell: int, sign: str = "-") -> float:
    """max_k |psi_f(ell, k) - phi(k/ell) -+ chi(k/ell) phi''(k/ell) / (2 ell)|.

    ``sign="-"`` subtracts the curvature correction, ``sign="+"`` adds it.
    """
    if sign not in ("+", "-"):
        raise InputError("sign must be '+' or '-'")
    s = 1 if sign == "+" else -1
    phi = grand_canonical(f)
    phi2 = phi.derivative(2)
    chi = compressibility()
    worst = Fraction(0)
    for k, psi in enumerate(canonical_table(f, ell)):
        sig = Fraction(k, ell)
        approx = phi.exact(sig) + s * chi.exact(sig) * phi2.exact(sig) / (2 * ell)
        worst = max(worst, abs(psi - approx))
    return float(worst)


def canonical_second_moment(f: LocalFunction, rho, ell: int) -> Fraction:
    """Integral of psi_f(ell)^2 against Bernoulli(rho), summed exactly over k."""
    r = Fraction(rho)
    table = canonical_table(f, ell)
    return sum(
        (comb(ell, k) * r**k * (1 - r) ** (ell - k) * psi * psi for k, psi in enumerate(table)),
        Fraction(0),
    )


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    return float(np.polyfit(lx, ly, 1)[0])


def canonical_variance_decay(f: LocalFunction, rho, ells: Sequence[int]) -> tuple[float, list[float]]:
    """Log-log slope of the canonical second moment across ``ells`` and the values."""
    values = [float(canonical_second_moment(f, rho, ell)) for ell in ells]
    return loglog_slope(ells, values), values


def tower_defect(f: LocalFunction, rho, ell: int) -> Fraction:
    """sum_k Binom(ell, k, rho) psi_f(ell, k) - phi_f(rho); zero for every f."""
    r = Fraction(rho)
    table = canonical_table(f, ell)
    mean = sum(
        (comb(ell, k) * r**k * (1 - r) ** (ell - k) * psi for k, psi in enumerate(table)),
        Fraction(0),
    )
    return mean - grand_canonical(f).exact(r)


def centered_product(sites: Sequence[int], rho) -> LocalFunction:
    """prod over sites of (eta(s) - rho)."""
    rho = float(rho)
    sites = tuple(sites)

    def value(p):
        out = 1.0
        for s in sites:
            out *= p[s] - rho
        return out

    return LocalFunction.from_callable(sites, value)


def is_centered(poly: ThermoPolynomial, rho, order: int, tol: float = 1e-12) -> bool:
    """Whether the first ``order`` derivatives (0..order-1) vanish at rho."""
    return all(abs(poly.derivative(k)(float(rho))) <= tol for k in range(order))
