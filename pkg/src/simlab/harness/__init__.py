"""Configuration, orchestration and reporting."""

from .config import DEFAULTS, EXPERIMENTS, ExperimentConfig, build_config
from .experiments import REGISTRY, Check, Outcome
from .report import summarize
from .runner import run_experiment
