"""Acceptance criteria, each run at its stated tolerance through the experiment harness.

Every test prints one PASS/FAIL line; the lines are collected again in the
terminal summary. Monte Carlo bundles are shared between experiments that use
the same configuration (white noise / Cole-Hopf / height, and Hoelder / energy).
"""

import time

import pytest

from simlab.harness.config import build_config
from simlab.harness.runner import run_experiment

_outcomes = {}


@pytest.fixture(scope="session")
def outdir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def outcome(name, outdir):
    if name not in _outcomes:
        start = time.time()
        result, _ = run_experiment(build_config({"experiment": name}), str(outdir))
        _outcomes[name] = (result, time.time() - start)
    return _outcomes[name]


def judge(acceptance_log, number, title, results):
    checks = [c for res, _ in results for c in res.checks if c.criterion == number]
    seconds = sum(sec for _, sec in results)
    ok = bool(checks) and all(c.passed for c in checks)
    detail = "; ".join(f"{c.name}={c.measured:.4g} ({c.expected})" for c in checks)
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'} {title} [{seconds:.0f}s]: {detail}"
    print(line)
    acceptance_log.append(line)
    assert ok, line


def test_tiny_ring_matches_exact_law(outdir, acceptance_log):
    judge(acceptance_log, "1", "tiny-ring empirical law vs matrix exponential", [outcome("stationarity", outdir)])


def test_conservation_and_continuity(outdir, acceptance_log):
    judge(acceptance_log, "2", "particle count and continuity exact", [outcome("stationarity", outdir)])


def test_stationary_white_noise(outdir, acceptance_log):
    judge(acceptance_log, "3", "stationary field is white noise of variance chi", [outcome("whitenoise", outdir)])


def test_equivalence_of_ensembles(outdir, acceptance_log):
    judge(acceptance_log, "4", "canonical oracle and expansion rates", [outcome("eoe", outdir)])


def test_spectral_gap_and_dual_norm(outdir, acceptance_log):
    judge(acceptance_log, "5", "gap scaling and dual-norm bound", [outcome("gap", outdir)])


def test_second_order_replacement(outdir, acceptance_log):
    judge(acceptance_log, "6", "second-order replacement bounded by one envelope", [outcome("bg2", outdir)])


def test_first_order_replacement_rate(outdir, acceptance_log):
    judge(acceptance_log, "7", "first-order residual variance decays like 1/n", [outcome("bg1", outdir)])


def test_energy_and_hoelder_scaling(outdir, acceptance_log):
    judge(acceptance_log, "8", "nonlinear field t^1.5 scaling and eps-stable energy ratio",
          [outcome("holder", outdir), outcome("energy", outdir)])


def test_quadratic_variation(outdir, acceptance_log):
    judge(acceptance_log, "9", "predicted quadratic variation and martingale identity", [outcome("qv", outdir)])


def test_cole_hopf_cross_validation(outdir, acceptance_log):
    judge(acceptance_log, "10", "particle field vs Cole-Hopf of the heat equation",
          [outcome("whitenoise", outdir), outcome("she-compare", outdir)])


def test_symmetric_autocovariance(outdir, acceptance_log):
    judge(acceptance_log, "11", "symmetric autocovariance vs spectral OU", [outcome("ou-compare", outdir)])


def test_height_field(outdir, acceptance_log):
    judge(acceptance_log, "12", "height constructions, Brownian increments, Wick mean",
          [outcome("whitenoise", outdir), outcome("height", outdir)])
