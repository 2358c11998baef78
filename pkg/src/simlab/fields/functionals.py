"""Time-integrated functionals of a trajectory, expressed as engine integrands.

The engine integrates every additive functional exactly over inter-event
intervals; the builders here only choose the local function and the weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from ..dynamics.engine import BlockIntegrand, LocalIntegrand
from ..errors import InputError, ModelError
from ..lattice.local import LocalFunction
from ..lattice.model import (
    ModelSpec,
    Thermodynamics,
    drift_function,
    exchange_activity,
    thermodynamics,
)
from ..lattice.thermo import grand_canonical
from .calculus import ring_grad, ring_lap, ring_vector
from .observables import frame_velocity
from .testfunctions import TestFunction


def _require_static_frame(spec: ModelSpec):
    if abs(frame_velocity(spec)) > 1e-9:
        raise InputError("time-integrated fields need a density where the flux derivative vanishes")


def occupation_integrand(name: str, spec: ModelSpec, weights: np.ndarray) -> LocalIntegrand:
    """int_0^t (1/sqrt n) sum_x (eta(x) - rho) w(x) ds."""
    f = LocalFunction((0,), (-spec.density, 1 - spec.density))
    return LocalIntegrand(name, f, np.asarray(weights, float) / sqrt(spec.scale))


def drift_integrand(name: str, spec: ModelSpec, u: TestFunction,
                    thermo: Thermodynamics | None = None) -> LocalIntegrand:
    """I_t(u) = int_0^t (1/sqrt n) sum_x (tau_x omega - phi_omega(rho)) lap_n u(x) ds."""
    _require_static_frame(spec)
    try:
        thermo = thermo or thermodynamics(spec)
    except ModelError as exc:
        raise ModelError(f"drift field needs a gradient model: {exc}") from None
    w = thermo.omega - thermo.omega_poly(spec.density)
    vec = ring_vector(u, spec)
    return LocalIntegrand(name, w, ring_lap(vec, spec.scale) / sqrt(spec.scale))


def nonlinear_integrand(name: str, spec: ModelSpec, u: TestFunction,
                        thermo: Thermodynamics | None = None) -> LocalIntegrand:
    """The compensator of the asymmetric part: -int_0^t sum_x tau_x f grad_n u(x) ds.

    Under the literal jump convention the asymmetric part of the generator
    applied to Y(u) is minus the displayed sum, so the weight carries a minus.
    """
    _require_static_frame(spec)
    thermo = thermo or thermodynamics(spec)
    f = drift_function(spec, thermo)
    vec = ring_vector(u, spec)
    return LocalIntegrand(name, f, -ring_grad(vec, spec.scale))


def activity_integrand(name: str, spec: ModelSpec, u: TestFunction) -> LocalIntegrand:
    """Predicted quadratic variation: int_0^t (1/n) sum_x tau_x zeta_n (grad_n u(x))^2 ds."""
    vec = ring_vector(u, spec)
    return LocalIntegrand(name, exchange_activity(spec), ring_grad(vec, spec.scale) ** 2 / spec.scale)


def weighted_local_integrand(name: str, f: LocalFunction, weights: np.ndarray) -> LocalIntegrand:
    """int_0^t sum_x tau_x f(eta_s) w(x) ds."""
    return LocalIntegrand(name, f, np.asarray(weights, float))


def block_integrand(name: str, ell: int, weights: np.ndarray) -> BlockIntegrand:
    """int_0^t sum_x (eta^ell(x) - rho)^2 w(x) ds."""
    return BlockIntegrand(name, int(ell), np.asarray(weights, float))


def block_length(eps: float, n: int) -> int:
    ell = int(np.ceil(eps * n - 1e-9))
    if ell < 1:
        raise InputError(f"eps={eps} is below the lattice spacing 1/{n}")
    return ell


def quadratic_integrand(name: str, spec: ModelSpec, u: TestFunction, eps: float) -> BlockIntegrand:
    """A^eps_{0,t}(u) = int_0^t sum_x (eta^{eps n}(x) - rho)^2 grad_n u(x) ds.

    The chi/ell part of Q integrates grad_n u to zero on the ring, so the square
    alone is the microscopic quadratic functional.
    """
    _require_static_frame(spec)
    w = ring_grad(ring_vector(u, spec), spec.scale)
    return BlockIntegrand(name, block_length(eps, spec.scale), w)


@dataclass(frozen=True)
class WickPlan:
    """Block integrand plus the constant subtracted to form the Wick functional."""

    integrand: BlockIntegrand
    rate_offset: float  # subtract rate_offset * t from the integral

    def value(self, integral: float, t: float) -> float:
        return integral - self.rate_offset * t


def wick_integrand(name: str, spec: ModelSpec, u: TestFunction, eps: float) -> WickPlan:
    """Ã^eps_{0,t}(u) = int_0^t sum_x Q_rho(eps n; tau_x eta) u(x/n) ds."""
    _require_static_frame(spec)
    ell = block_length(eps, spec.scale)
    vec = ring_vector(u, spec)
    chi = spec.density * (1 - spec.density)
    return WickPlan(BlockIntegrand(name, ell, vec), chi / ell * float(vec.sum()))


@dataclass
class MartingaleProbe:
    """Integrands and observers needed for the martingale decomposition of Y(u)."""

    spec: ModelSpec
    u: TestFunction
    tag: str = "u"

    def __post_init__(self):
        self.thermo = thermodynamics(self.spec)
        self.vec = ring_vector(self.u, self.spec)

    @property
    def names(self):
        t = self.tag
        return {"Y": f"Y[{t}]", "I": f"I[{t}]", "B": f"B[{t}]", "QV": f"QV[{t}]"}

    def integrands(self):
        nm = self.names
        return [
            drift_integrand(nm["I"], self.spec, self.u, self.thermo),
            nonlinear_integrand(nm["B"], self.spec, self.u, self.thermo),
            activity_integrand(nm["QV"], self.spec, self.u),
        ]

    def observers(self):
        vec, rho, n = self.vec, self.spec.density, self.spec.scale
        return {self.names["Y"]: lambda st: float(np.dot(st.occupancy - rho, vec) / sqrt(n))}

    def martingale(self, series, t: float) -> float:
        """M_t = Y_t - Y_0 - I_t - B_t from a run's series (sample times must include 0 and t)."""
        nm = self.names
        y = series[nm["Y"]]
        return y.at(t) - y.at(0.0) - series[nm["I"]].at(t) - series[nm["B"]].at(t)


def mean_drift_check(spec: ModelSpec) -> float:
    """phi_f(rho) of the nonlinear integrand; zero by construction."""
    return grand_canonical(drift_function(spec))(spec.density)
