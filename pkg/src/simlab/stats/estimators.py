"""Batch-means estimates, power-law fits and Gaussianity diagnostics."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from math import sqrt

import numpy as np
from scipy import stats

from ..errors import InputError

MAX_BATCHES = 100


@dataclass(frozen=True)
class EstimateWithError:
    estimate: float
    stderr: float
    replicas: int
    batch_size: int

    def z(self, target: float = 0.0) -> float:
        """Distance from ``target`` in standard errors."""
        if self.stderr == 0:
            return 0.0 if self.estimate == target else float("inf")
        return (self.estimate - target) / self.stderr

    def within(self, target: float, k: float = 4.0) -> bool:
        return abs(self.estimate - target) <= k * self.stderr

    def to_dict(self):
        return asdict(self)


def batch_means(samples, batches: int | None = None) -> EstimateWithError:
    """Mean with a batch-means standard error over consecutive replica batches."""
    x = np.asarray(samples, float).ravel()
    n = x.size
    if n < 2:
        raise InputError("need at least two samples")
    b = min(n, batches or MAX_BATCHES)
    parts = np.array_split(x, b)
    means = np.array([p.mean() for p in parts])
    se = float(means.std(ddof=1) / sqrt(b))
    return EstimateWithError(float(x.mean()), se, n, int(np.ceil(n / b)))


def second_moment(samples, batches: int | None = None) -> EstimateWithError:
    return batch_means(np.asarray(samples, float) ** 2, batches)


def variance_estimate(samples, batches: int | None = None) -> EstimateWithError:
    """Unbiased variance; the error bar treats squared deviations as batch-mean samples."""
    x = np.asarray(samples, float).ravel()
    n = x.size
    dev = (x - x.mean()) ** 2 * n / (n - 1)
    return batch_means(dev, batches)


def covariance_estimate(x, y, batches: int | None = None) -> EstimateWithError:
    x = np.asarray(x, float).ravel()
    y = np.asarray(y, float).ravel()
    n = x.size
    prod = (x - x.mean()) * (y - y.mean()) * n / (n - 1)
    return batch_means(prod, batches)


@dataclass(frozen=True)
class ScalingFit:
    x: tuple
    y: tuple
    slope: float
    intercept: float
    r2: float

    def to_dict(self):
        return asdict(self)


def fit_power_law(x, y) -> ScalingFit:
    """Least-squares line through (log x, log y)."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.size < 2 or np.any(x <= 0) or np.any(y <= 0):
        raise InputError("power-law fit needs >= 2 points with positive coordinates")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 1.0
    return ScalingFit(tuple(x.tolist()), tuple(y.tolist()), float(slope), float(intercept), r2)


def gaussianity_suite(samples) -> dict[str, float]:
    """Skewness and excess kurtosis with their large-sample standard errors, and the KS distance to a fitted normal."""
    x = np.asarray(samples, float).ravel()
    n = x.size
    if n < 8:
        raise InputError("need at least eight samples")
    mu, sd = float(x.mean()), float(x.std(ddof=1))
    return {
        "skewness": float(stats.skew(x)),
        "skewness_se": sqrt(6.0 / n),
        "excess_kurtosis": float(stats.kurtosis(x)),
        "kurtosis_se": sqrt(24.0 / n),
        "ks": float(stats.kstest(x, "norm", args=(mu, sd)).statistic),
        "n": n,
    }


def ks_two_sample(a, b) -> float:
    return float(stats.ks_2samp(np.ravel(a), np.ravel(b)).statistic)


def max_adjacent_ratio(values) -> float:
    """Largest ratio between neighbours on a grid, in either direction."""
    v = np.asarray(values, float)
    r = v[1:] / v[:-1]
    return float(np.max(np.maximum(r, 1 / r)))
