"""Test functions, discrete calculus and fluctuation fields."""

from .calculus import (
    energy_n,
    grad_n,
    lap_n,
    ring_energy,
    ring_grad,
    ring_lap,
    ring_positions,
    ring_vector,
)
from .functionals import (
    MartingaleProbe,
    WickPlan,
    activity_integrand,
    block_integrand,
    block_length,
    drift_integrand,
    nonlinear_integrand,
    occupation_integrand,
    quadratic_integrand,
    weighted_local_integrand,
    wick_integrand,
)
from .observables import (
    HeightProfile,
    block_average,
    block_quadratic,
    current_field,
    density_field,
    frame_velocity,
    height_field,
    indicator_field,
    squared_increment_field,
    summation_by_parts_residual,
)
from .testfunctions import (
    CutoffLogistic,
    Hermite,
    Primitive,
    Scaled,
    Shifted,
    Tabulated,
    TestFunction,
    logistic_gap_energy,
    parse_test_function,
)
