"""Continuum reference solvers used to cross-check the particle fields."""

from .ou import SpectralOU, line_autocovariance_hermite0, ou_step, torus_coefficients
from .she import (
    SHEGrid,
    brownian_profile,
    cole_hopf_field,
    she_evolve,
    she_step,
    stationary_she,
)
