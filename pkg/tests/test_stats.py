from math import exp, sqrt

import numpy as np
import pytest

from simlab.errors import InputError
from simlab.stats import (
    batch_means,
    covariance_estimate,
    fit_power_law,
    gaussianity_suite,
    ks_two_sample,
    max_adjacent_ratio,
    variance_estimate,
)


def test_standard_error_shrinks_like_root_replicas():
    rng = np.random.default_rng(0)
    se = [batch_means(rng.normal(size=r)).stderr for r in (1000, 4000, 16000)]
    assert se[0] / se[1] == pytest.approx(2, rel=0.25)
    assert se[1] / se[2] == pytest.approx(2, rel=0.25)


def test_batch_means_small_inputs():
    est = batch_means([1.0, 3.0])
    assert est.estimate == 2 and est.replicas == 2 and est.batch_size == 1
    assert est.stderr == pytest.approx(1.0)
    with pytest.raises(InputError):
        batch_means([1.0])


def test_within_and_z():
    est = batch_means(np.arange(10.0))
    assert est.within(est.estimate + 3.9 * est.stderr)
    assert not est.within(est.estimate + 4.1 * est.stderr)
    assert est.z(est.estimate) == 0


def test_power_law_slope_is_exact_on_clean_data():
    x = np.array([8, 16, 32, 64, 128.0])
    fit = fit_power_law(x, 3.0 * x**-1.5)
    assert fit.slope == pytest.approx(-1.5, abs=1e-12)
    assert fit.intercept == pytest.approx(np.log(3.0))
    assert fit.r2 == pytest.approx(1.0)
    with pytest.raises(InputError):
        fit_power_law([1.0], [1.0])
    with pytest.raises(InputError):
        fit_power_law([1.0, 2.0], [1.0, -1.0])


def test_gaussianity_suite_is_calibrated():
    rng = np.random.default_rng(1)
    g = gaussianity_suite(rng.normal(2.0, 3.0, size=8000))
    assert abs(g["skewness"]) < 4 * g["skewness_se"]
    assert abs(g["excess_kurtosis"]) < 4 * g["kurtosis_se"]
    assert g["ks"] < 0.02
    e = gaussianity_suite(rng.exponential(size=8000))
    assert e["skewness"] > 10 * e["skewness_se"]
    with pytest.raises(InputError):
        gaussianity_suite(np.ones(5))


def test_variance_and_covariance_estimates():
    rng = np.random.default_rng(2)
    x = rng.normal(size=20000)
    y = 0.5 * x + rng.normal(size=20000)
    assert variance_estimate(x).within(1.0)
    assert covariance_estimate(x, y).within(0.5)


def test_interval_coverage_on_exact_ou_pairs():
    # stationary OU with unit variance: (Y_0, Y_t) is Gaussian with covariance exp(-t)
    rng = np.random.default_rng(3)
    t, hits, trials = 0.7, 0, 300
    target = exp(-t)
    for _ in range(trials):
        y0 = rng.normal(size=400)
        yt = target * y0 + sqrt(1 - target**2) * rng.normal(size=400)
        hits += batch_means(y0 * yt).within(target, k=2.0)
    assert hits / trials >= 0.90


def test_ks_and_adjacent_ratio():
    rng = np.random.default_rng(4)
    assert ks_two_sample(rng.normal(size=2000), rng.normal(size=2000)) < 0.06
    assert ks_two_sample(np.zeros(10), np.ones(10)) == 1.0
    assert max_adjacent_ratio([1.0, 2.0, 1.5]) == 2.0
    assert max_adjacent_ratio([4.0, 1.0]) == 4.0
