"""Monte Carlo experiments built on the replica farm.

Each experiment returns an :class:`ExperimentResult`: plot-ready rows, a
summary of headline numbers and the raw per-replica samples the rows were
computed from, so every statistic can be recomputed offline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from ..dynamics.engine import BlockIntegrand, LocalIntegrand
from ..errors import InputError, PreconditionError
from ..farm import Probe, simulate
from ..fields.calculus import ring_energy, ring_grad, ring_positions, ring_vector
from ..fields.functionals import (
    activity_integrand,
    block_length,
    drift_integrand,
    nonlinear_integrand,
    occupation_integrand,
    quadratic_integrand,
    wick_integrand,
)
from ..fields.observables import frame_velocity
from ..fields.testfunctions import CutoffLogistic, TestFunction, logistic_gap_energy
from ..lattice.local import LocalFunction
from ..lattice.model import ModelSpec, drift_function, thermodynamics
from ..lattice.thermo import grand_canonical
from .estimators import (
    EstimateWithError,
    ScalingFit,
    batch_means,
    fit_power_law,
    max_adjacent_ratio,
    second_moment,
    variance_estimate,
)


@dataclass
class ExperimentResult:
    rows: list[dict]
    summary: dict
    samples: dict[str, np.ndarray] = field(default_factory=dict)
    times: tuple = ()


def _static_frame(spec: ModelSpec):
    if abs(frame_velocity(spec)) > 1e-9:
        raise PreconditionError(
            f"density {spec.density} moves fluctuations at {frame_velocity(spec):.3g} sites per unit time; "
            "time-integrated experiments need a density with stationary flux"
        )


def _centering(f: LocalFunction, rho: float, order: int):
    poly = grand_canonical(f)
    for k in range(order + 1):
        val = float(poly.derivative(k)(rho)) if k else float(poly(rho))
        if abs(val) > 1e-12:
            raise PreconditionError(f"derivative {k} of the grand-canonical mean is {val:.3g} at rho={rho}, not 0")
    return poly


def _est_row(est: EstimateWithError, **params) -> dict:
    row = dict(params)
    row.update(estimate=est.estimate, stderr=est.stderr, replicas=est.replicas)
    return row


# second-order Boltzmann-Gibbs


def bg2_experiment(spec: ModelSpec, ells, t: float, replicas: int, seed: int = 0,
                   f: LocalFunction | None = None, v=None, u: TestFunction | None = None) -> ExperimentResult:
    """Second moment of int_0^t sum_x tau_x{f - (phi_f''/2) Q(ell)} v(x) ds for each block length.

    ``f`` defaults to the model's nonlinear drift function; ``v`` defaults to
    grad_n u on the ring with ``u`` a test function. The envelope is
    (ell/n^2 + t/ell^2) t ||v||^2 with the l2 norm over sites.
    """
    _static_frame(spec)
    if f is None:
        f = drift_function(spec)
    poly = _centering(f, spec.density, 1)
    curvature = float(poly.derivative(2)(spec.density))
    if v is None:
        if u is None:
            raise InputError("bg2 needs a weight vector or a test function")
        v = ring_grad(ring_vector(u, spec), spec.scale)
    v = np.asarray(v, float)
    ells = [int(l) for l in ells]
    reach = max(f.window) - min(f.window) + 1
    if min(ells) < reach:
        raise PreconditionError(f"block length must be at least the support size {reach}")
    chi = spec.density * (1 - spec.density)
    integrands = [LocalIntegrand("F", f, v)] + [BlockIntegrand(f"Q{l}", l, v) for l in ells]
    data = simulate(spec, seed, replicas, [t], Probe(integrands=integrands))
    local = data["F"][:, -1]
    norm2 = float(np.sum(v**2))
    rows, samples = [], {"F": local}
    for l in ells:
        q = data[f"Q{l}"][:, -1] - t * chi / l * float(v.sum())
        x = local - curvature / 2 * q
        samples[f"X{l}"] = x
        est = second_moment(x)
        env = (l / spec.scale**2 + t / l**2) * t * norm2
        rows.append(_est_row(est, n=spec.scale, ell=l, t=t, envelope=env, ratio=est.estimate / env))
    ratios = [r["ratio"] for r in rows]
    summary = {
        "K_hat": max(ratios),
        "max_upward_drift": max([b / a for a, b in zip(ratios, ratios[1:])], default=1.0),
        "curvature": curvature,
        "norm2": norm2,
    }
    if len(ells) >= 3:
        big = ells[len(ells) // 2:]
        summary["large_ell_slope"] = fit_power_law(big, [r["estimate"] for r in rows[len(ells) // 2:]]).slope
    return ExperimentResult(rows, summary, samples, (t,))


def bg2_epsilon_scan(spec: ModelSpec, eps: float, ns, t: float, replicas: int, seed: int = 0,
                     u: TestFunction | None = None, ring_mult: int | None = None) -> ExperimentResult:
    """The bg2 functional at ell = eps n for each n, with v = grad_n u."""
    rows, samples = [], {}
    mult = ring_mult or spec.ring_size // spec.scale
    for n in ns:
        sn = spec.replace(scale=int(n), ring_size=mult * int(n))
        ell = block_length(eps, sn.scale)
        res = bg2_experiment(sn, [ell], t, replicas, seed, u=u)
        row = dict(res.rows[0])
        row["eps"] = eps
        rows.append(row)
        samples[f"X[n={n}]"] = res.samples[f"X{ell}"]
    est = [r["estimate"] for r in rows]
    decreasing = all(b < a for a, b in zip(est, est[1:]))
    return ExperimentResult(rows, {"decreasing": decreasing, "estimates": est}, samples, (t,))


# first-order Boltzmann-Gibbs


def first_order_residual(f: LocalFunction, rho: float) -> LocalFunction:
    """f - phi_f(rho) - phi_f'(rho)(eta(0) - rho)."""
    poly = grand_canonical(f)
    occ = LocalFunction.occupation(0)
    return (f - float(poly(rho)) - (occ - rho) * float(poly.derivative()(rho))).pruned()


def bg1_experiment(spec: ModelSpec, f: LocalFunction, u: TestFunction, ns, t: float, replicas: int,
                   seed: int = 0, ring_mult: int | None = None) -> ExperimentResult:
    """Variance of int_0^t (1/sqrt n) sum_x tau_x f~ u(x/n) ds against n, f~ the first-order residual."""
    g = first_order_residual(f, spec.density)
    mult = ring_mult or spec.ring_size // spec.scale
    rows, samples = [], {}
    if all(abs(v) < 1e-15 for v in g.table):
        for n in ns:
            rows.append(dict(n=int(n), t=t, estimate=0.0, stderr=0.0, replicas=0))
        return ExperimentResult(rows, {"identically_zero": True, "slope": None}, {}, (t,))
    for n in ns:
        sn = spec.replace(scale=int(n), ring_size=mult * int(n))
        w = ring_vector(u, sn) / sqrt(sn.scale)
        data = simulate(sn, seed, replicas, [t], Probe(integrands=[LocalIntegrand("R", g, w)]))
        x = data["R"][:, -1]
        samples[f"R[n={n}]"] = x
        rows.append(_est_row(variance_estimate(x), n=int(n), t=t))
    fit = fit_power_law([r["n"] for r in rows], [r["estimate"] for r in rows])
    return ExperimentResult(rows, {"identically_zero": False, "slope": fit.slope, "r2": fit.r2,
                                   "fit": fit.to_dict()}, samples, (t,))


# martingale decomposition and quadratic variation


def martingale_probe(spec: ModelSpec, u: TestFunction) -> Probe:
    th = thermodynamics(spec)
    return Probe(
        pairings={"Y": ring_vector(u, spec)},
        integrands=[
            drift_integrand("I", spec, u, th),
            nonlinear_integrand("B", spec, u, th),
            activity_integrand("QV", spec, u),
        ],
    )


def qv_convergence(spec: ModelSpec, u: TestFunction, ns, t: float, replicas: int, seed: int = 0,
                   ring_mult: int | None = None) -> ExperimentResult:
    """Predicted quadratic variation per unit time against 2 chi D E(u), with the martingale check."""
    _static_frame(spec)
    mult = ring_mult or spec.ring_size // spec.scale
    chi = spec.density * (1 - spec.density)
    D = float(thermodynamics(spec).diffusivity(spec.density))
    limit = 2 * chi * D * u.energy()
    rows, samples = [], {}
    for n in ns:
        sn = spec.replace(scale=int(n), ring_size=mult * int(n))
        data = simulate(sn, seed, replicas, [0.0, t], martingale_probe(sn, u))
        y = data["Y"]
        m = y[:, 1] - y[:, 0] - data["I"][:, 1] - data["B"][:, 1]
        qv = data["QV"][:, 1]
        samples.update({f"M[n={n}]": m, f"QV[n={n}]": qv})
        e_n = ring_energy(ring_vector(u, sn), sn.scale)
        qv_rate = batch_means(qv / t)
        gap = batch_means(m**2 - qv)
        rows.append(dict(
            n=int(n), t=t, qv_rate=qv_rate.estimate, qv_rate_se=qv_rate.stderr,
            target_n=2 * chi * D * e_n, limit=limit,
            rel_err=qv_rate.estimate / (2 * chi * D * e_n) - 1,
            m2_minus_qv=gap.estimate, m2_minus_qv_se=gap.stderr,
            mean_m=float(m.mean()), replicas=replicas,
        ))
    summary = {"limit": limit}
    if len(rows) >= 2:
        dev = [abs(r["qv_rate"] - limit) for r in rows]
        if all(d > 0 for d in dev):
            summary["approach_slope"] = fit_power_law([r["n"] for r in rows], dev).slope
    return ExperimentResult(rows, summary, samples, (0.0, t))


# energy conditions and Hoelder scaling


@dataclass
class EnergyPlan:
    """Which integrands an energy-condition bundle carries."""

    u: TestFunction
    eps: tuple
    u_laplacian: TestFunction | None = None
    u_wick: TestFunction | None = None

    def block_lengths(self, n: int) -> list[int]:
        out = set()
        for e in self.eps:
            out.add(block_length(e, n))
            out.add(block_length(e / 2, n))
        return sorted(out, reverse=True)

    def probe(self, spec: ModelSpec) -> Probe:
        _static_frame(spec)
        if self.u_wick is not None and abs(self.u_wick.mass) > 1e-9:
            raise PreconditionError("the Wick energy condition needs a test function of zero mass")
        ints = [nonlinear_integrand("B", spec, self.u)]
        if self.u_laplacian is not None:
            w = np.asarray(self.u_laplacian.lap(ring_positions(spec)), float)
            ints.append(occupation_integrand("L", spec, w))
        for ell in self.block_lengths(spec.scale):
            e = ell / spec.scale
            ints.append(quadratic_integrand(f"A{ell}", spec, self.u, e))
            if self.u_wick is not None:
                ints.append(wick_integrand(f"W{ell}", spec, self.u_wick, e).integrand)
        return Probe(integrands=ints)


def energy_bundle(spec: ModelSpec, plan: EnergyPlan, times, replicas: int, seed: int = 0):
    return simulate(spec, seed, replicas, list(times), plan.probe(spec))


def holder_scaling(bundle, times) -> ExperimentResult:
    """E[B_t(u)^2] against t with its log-log slope."""
    rows, est = [], []
    for i, t in enumerate(times):
        e = second_moment(bundle["B"][:, i])
        est.append(e.estimate)
        rows.append(_est_row(e, t=t))
    fit = fit_power_law(times, est)
    return ExperimentResult(rows, {"slope": fit.slope, "r2": fit.r2}, {"B": bundle["B"]}, tuple(times))


def resolved_times(plan: EnergyPlan, n: int, times) -> list[float]:
    """Times at which the finite-n term t^2/(eps^2 n) stays below eps t for the finest eps."""
    eps = min(plan.eps)
    return [t for t in times if t <= eps**3 * n]


def energy_condition_suite(bundle, spec: ModelSpec, plan: EnergyPlan, times,
                           ec1_times=None, ec2_times=None) -> ExperimentResult:
    """Measured second moments over their envelopes; kappa-hat is the largest ratio seen.

    Drift summaries: EC1 across ``ec1_times`` (default all), EC2 and EC2' across
    the eps grid at each of ``ec2_times`` (default :func:`resolved_times`).
    """
    rows = []
    n = spec.scale
    chi = spec.density * (1 - spec.density)
    times = list(times)
    ec1_times = list(times if ec1_times is None else ec1_times)
    ec2_times = list(resolved_times(plan, n, times) if ec2_times is None else ec2_times)
    kappa, summary = {}, {"ec1_times": ec1_times, "ec2_times": ec2_times}
    if plan.u_laplacian is not None:
        E = plan.u_laplacian.energy()
        for i, t in enumerate(times):
            e = second_moment(bundle["L"][:, i])
            rows.append(_est_row(e, condition="EC1", t=t, eps=0.0, ratio=e.estimate / (t * E)))
        ratios = [r["ratio"] for r in rows if r["condition"] == "EC1" and r["t"] in ec1_times]
        kappa["EC1"] = max(r["ratio"] for r in rows if r["condition"] == "EC1")
        summary["EC1_drift"] = max_adjacent_ratio(ratios) if len(ratios) > 1 else 1.0

    def differences(cond, key, norm, offset):
        for eps in plan.eps:
            big, small = block_length(eps, n), block_length(eps / 2, n)
            for i, t in enumerate(times):
                d = bundle[f"{key}{big}"][:, i] - bundle[f"{key}{small}"][:, i] - offset * t * (1 / big - 1 / small)
                e = second_moment(d)
                rows.append(_est_row(e, condition=cond, t=t, eps=big / n, ratio=e.estimate / (t * big / n * norm)))
        kappa[cond] = max(r["ratio"] for r in rows if r["condition"] == cond)
        drift = 1.0
        for t in ec2_times:
            r = [x["ratio"] for x in rows if x["condition"] == cond and x["t"] == t]
            if len(r) > 1:
                drift = max(drift, max_adjacent_ratio(r))
        summary[f"{cond}_drift"] = drift

    differences("EC2", "A", plan.u.energy(), 0.0)
    if plan.u_wick is not None:
        mass = float(ring_vector(plan.u_wick, spec).sum())
        differences("EC2'", "W", plan.u_wick.norm2(), chi * mass)
    summary["kappa"] = kappa
    return ExperimentResult(rows, summary, {}, tuple(times))


# Cauchy-in-M diagnostic for the logistic family


def fm_convergence(spec: ModelSpec, Ms, t: float, replicas: int, seed: int = 0) -> ExperimentResult:
    """Var of the increment of Y(F_M - F_2M) over [0, t] for each M, with the energy-ratio bound."""
    _static_frame(spec)
    Ms = [float(m) for m in Ms]
    half = spec.ring_size / spec.scale / 2
    if 2 * max(Ms) + 2 > half:
        raise InputError(f"ring half-length {half} is too short for cutoff scale {2 * max(Ms)}")
    pair = {}
    for M in Ms:
        pair[f"D{M:g}"] = ring_vector(CutoffLogistic(M), spec) - ring_vector(CutoffLogistic(2 * M), spec)
    data = simulate(spec, seed, replicas, [0.0, t], Probe(pairings=pair))
    rows, samples = [], {}
    for M in Ms:
        inc = data[f"D{M:g}"][:, 1] - data[f"D{M:g}"][:, 0]
        samples[f"D{M:g}"] = inc
        e = variance_estimate(inc)
        rows.append(_est_row(e, M=M, t=t, gap_energy=logistic_gap_energy(M, 2 * M)))
    bounded = True
    for a, b in zip(rows, rows[1:]):
        vr = b["estimate"] / a["estimate"] if a["estimate"] > 0 else 0.0
        er = b["gap_energy"] / a["gap_energy"]
        b["variance_ratio"], b["energy_ratio"] = vr, er
        bounded &= vr <= 4 * er
    return ExperimentResult(rows, {"bounded_by_energy": bool(bounded)}, samples, (0.0, t))


__all__ = [
    "ExperimentResult", "bg2_experiment", "bg2_epsilon_scan", "bg1_experiment",
    "first_order_residual", "qv_convergence", "martingale_probe", "EnergyPlan",
    "energy_bundle", "holder_scaling", "energy_condition_suite", "resolved_times", "fm_convergence",
    "ScalingFit",
]
