"""Estimators and the headline experiments."""

from .estimators import (
    EstimateWithError,
    ScalingFit,
    batch_means,
    covariance_estimate,
    fit_power_law,
    gaussianity_suite,
    ks_two_sample,
    max_adjacent_ratio,
    second_moment,
    variance_estimate,
)
