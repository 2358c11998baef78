"""Exact layer: local functions, model checks, thermodynamics, ensembles, small eigensolvers."""

from .ensembles import (
    canonical_expectation,
    canonical_expectation_exact,
    canonical_second_moment,
    canonical_table,
    canonical_variance_decay,
    centered_product,
    eoe_expansion_residual,
    tower_defect,
)
from .local import LocalFunction
from .model import (
    ConditionReport,
    ModelSpec,
    Thermodynamics,
    check_gradient_identity,
    drift_function,
    exchange_activity,
    exchange_current,
    thermodynamics,
    verify_conditions,
    verify_gradient,
)
from .spectral import h_minus_one_norm, sector_generator, sector_states, spectral_gap
from .thermo import ThermoPolynomial, compressibility, grand_canonical

evaluate = LocalFunction.evaluate

__all__ = [
    "LocalFunction", "ModelSpec", "ThermoPolynomial", "Thermodynamics", "ConditionReport",
    "evaluate", "verify_conditions", "verify_gradient", "check_gradient_identity",
    "grand_canonical", "compressibility", "thermodynamics", "drift_function",
    "exchange_current", "exchange_activity", "canonical_expectation",
    "canonical_expectation_exact", "canonical_table", "canonical_second_moment",
    "canonical_variance_decay", "eoe_expansion_residual", "tower_defect", "centered_product",
    "spectral_gap", "h_minus_one_norm", "sector_generator", "sector_states",
]
