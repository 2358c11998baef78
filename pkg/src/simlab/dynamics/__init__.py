"""Event-driven simulation of the ring process and its tiny-ring exact oracle."""

from .engine import (
    BlockIntegrand,
    LocalIntegrand,
    RunResult,
    Simulation,
    block_sums,
    bond_rate,
    expected_current_rate,
    run,
    sample_initial,
)
from .exact import bernoulli_law, exact_generator, index_state, state_index, transition_law
from .rng import stream
from .state import LatticeState

__all__ = [
    "BlockIntegrand", "LocalIntegrand", "RunResult", "Simulation", "block_sums", "bond_rate",
    "expected_current_rate", "run", "sample_initial", "bernoulli_law", "exact_generator",
    "index_state", "state_index", "transition_law", "stream", "LatticeState",
]
