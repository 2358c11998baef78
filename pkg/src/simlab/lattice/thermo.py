"""Exact polynomials in the density and the Bernoulli expectation of local functions."""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction
from math import comb

from .local import LocalFunction


class ThermoPolynomial:
    """Univariate polynomial with exact rational coefficients, lowest degree first."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Sequence):
        coeffs = [Fraction(c) for c in coefficients]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        self.coefficients = tuple(coeffs) if coeffs else (Fraction(0),)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def exact(self, sigma) -> Fraction:
        s = Fraction(sigma)
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * s + c
        return acc

    def __call__(self, sigma):
        if isinstance(sigma, Fraction):
            return self.exact(sigma)
        return float(self.exact(Fraction(float(sigma))))

    def derivative(self, order: int = 1) -> "ThermoPolynomial":
        coeffs = list(self.coefficients)
        for _ in range(order):
            coeffs = [k * c for k, c in enumerate(coeffs)][1:] or [Fraction(0)]
        return ThermoPolynomial(coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        m = max(len(self.coefficients), len(other.coefficients))
        a = list(self.coefficients) + [Fraction(0)] * (m - len(self.coefficients))
        b = list(other.coefficients) + [Fraction(0)] * (m - len(other.coefficients))
        return ThermoPolynomial([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return ThermoPolynomial([-c for c in self.coefficients])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return ThermoPolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ThermoPolynomial):
            other = _as_poly(other)
        return self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self) -> str:
        return f"ThermoPolynomial({[str(c) for c in self.coefficients]})"


def _as_poly(x) -> ThermoPolynomial:
    if isinstance(x, ThermoPolynomial):
        return x
    return ThermoPolynomial([Fraction(x)])


SIGMA = ThermoPolynomial([0, 1])


def compressibility() -> ThermoPolynomial:
    """sigma (1 - sigma), the single-site variance under Bernoulli(sigma)."""
    return SIGMA * (1 - SIGMA)


def _bernstein(ones: int, zeros: int) -> ThermoPolynomial:
    # sigma^ones (1 - sigma)^zeros expanded
    coeffs = [Fraction(0)] * (ones + zeros + 1)
    for j in range(zeros + 1):
        coeffs[ones + j] += Fraction((-1) ** j * comb(zeros, j))
    return ThermoPolynomial(coeffs)


def grand_canonical(f: LocalFunction) -> ThermoPolynomial:
    """Expectation of ``f`` under i.i.d. Bernoulli(sigma) sites, as a polynomial in sigma."""
    width = f.size
    by_count = [Fraction(0)] * (width + 1)
    for (idx, bits), value in zip(f.patterns(), f.exact_table()):
        by_count[sum(bits)] += value
    total = ThermoPolynomial([0])
    for k, weight in enumerate(by_count):
        if weight:
            total = total + weight * _bernstein(k, width - k)
    return total
