"""Experiment configuration: one JSON document, schema version 1."""

from __future__ import annotations

import copy
import json
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..errors import InputError
from ..lattice.local import LocalFunction
from ..lattice.model import ModelSpec

SCHEMA_VERSION = 1

EXPERIMENTS = (
    "verify-model", "stationarity", "whitenoise", "bg1", "bg2", "qv", "energy", "holder",
    "eoe", "gap", "she-compare", "ou-compare", "fm", "height",
)

Experiment = Literal[
    "verify-model", "stationarity", "whitenoise", "bg1", "bg2", "qv", "energy", "holder",
    "eoe", "gap", "she-compare", "ou-compare", "fm", "height",
]


def parse_rate(rate: str | dict | None) -> LocalFunction:
    """``None``/"constant" is r = 1, "speed_change:b" is 1 + b(eta(-1) + eta(2)), a dict is a serialized table."""
    if rate is None or rate == "constant":
        return LocalFunction.constant(1.0)
    if isinstance(rate, dict):
        return LocalFunction.from_dict(rate)
    if isinstance(rate, str) and rate.startswith("speed_change:"):
        b = float(rate.split(":", 1)[1])
        return LocalFunction.from_callable((-1, 2), lambda p: 1 + b * (p[-1] + p[2]))
    if isinstance(rate, str) and rate.startswith("scalar:"):
        return LocalFunction.constant(float(rate.split(":", 1)[1]))
    raise InputError(f"unknown rate {rate!r}")


class ModelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rate: str | dict | None = None
    asymmetry: float = 1.0
    scale: int = Field(64, ge=1)
    density: float = Field(0.5, ge=0.0, le=1.0)
    ring_mult: int = Field(32, ge=1)
    horizon: float = Field(1.0, gt=0.0)

    def spec(self) -> ModelSpec:
        return ModelSpec(
            rate=parse_rate(self.rate), asymmetry=self.asymmetry, scale=self.scale,
            density=self.density, ring_size=self.ring_mult * self.scale, horizon=self.horizon,
        )


class Grids(BaseModel):
    model_config = ConfigDict(extra="forbid")

    ell: list[int] = []
    eps: list[float] = []
    n: list[int] = []
    t: list[float] = []
    M: list[float] = []


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    experiment: Experiment
    model: ModelConfig = ModelConfig()
    test_functions: list[str] = []
    grids: Grids = Grids()
    replicas: int = Field(100, ge=2)
    seed: int = Field(0, ge=0, lt=2**64)
    out: str = "results"
    options: dict[str, Any] = {}

    @field_validator("test_functions")
    @classmethod
    def _known_functions(cls, names):
        from ..fields.testfunctions import parse_test_function

        for name in names:
            parse_test_function(name)
        return names

    def spec(self) -> ModelSpec:
        return self.model.spec()

    def option(self, key: str, default=None):
        return self.options.get(key, default)

    def canonical(self) -> dict:
        return self.model_dump(mode="json")


_HER0 = ["hermite:0"]

DEFAULTS: dict[str, dict] = {
    "verify-model": {"model": {"asymmetry": 1.0}, "options": {"search_window": None}},
    "stationarity": {
        "model": {"asymmetry": 1.0, "scale": 64, "horizon": 0.01},
        "replicas": 100,
        "grids": {"t": [0.0025, 0.005, 0.0075, 0.01]},
        "options": {"tiny_ring": 6, "tiny_replicas": 100000, "tiny_t": 1.0, "tiny_start": "111000",
                    "tiny_asymmetry": 1.0},
    },
    "whitenoise": {
        "model": {"asymmetry": 1.0, "scale": 64, "horizon": 0.05},
        "test_functions": ["hermite:0", "hermite:1"],
        "replicas": 2000,
        "options": {"translates": [-12.0, -4.0, 4.0, 12.0], "wick_eps": 0.125, "wick_function": "hermite:1"},
    },
    "she-compare": {
        "model": {"asymmetry": 1.0, "scale": 64, "horizon": 0.05},
        "test_functions": ["hermite:0", "hermite:1"],
        "replicas": 2000,
        "options": {"translates": [-12.0, -4.0, 4.0, 12.0], "wick_eps": 0.125, "wick_function": "hermite:1",
                    "L": 32.0, "dx": 0.0625, "dt": None, "she_replicas": 2000, "compare_function": "hermite:0"},
    },
    "height": {
        "model": {"asymmetry": 1.0, "scale": 64, "horizon": 0.05},
        "test_functions": ["hermite:0", "hermite:1"],
        "replicas": 2000,
        "grids": {"t": [0.0025, 0.005, 0.01]},
        "options": {"translates": [-12.0, -4.0, 4.0, 12.0], "wick_eps": 0.125, "wick_function": "hermite:1",
                    "height_replicas": 20, "initial_draws": 20000, "points": [0.25, 0.5, 1.0, 2.0]},
    },
    "eoe": {
        "grids": {"ell": [8, 16, 32, 64, 128, 256, 512]},
        "options": {"decay_ells": [8, 16, 32, 64, 128, 256, 512]},
    },
    "gap": {"grids": {"ell": list(range(2, 13))}, "options": {"samples": 100}},
    "bg2": {
        "model": {"asymmetry": 1.0, "scale": 64, "horizon": 0.25},
        "test_functions": _HER0,
        "grids": {"ell": [4, 8, 16, 32, 64], "n": [16, 32, 64], "eps": [0.25], "t": [0.25]},
        "replicas": 200,
    },
    "bg1": {
        "model": {"asymmetry": 0.0, "scale": 16, "ring_mult": 16, "horizon": 0.2},
        "test_functions": _HER0,
        "grids": {"n": [16, 32, 64, 128], "t": [0.2]},
        "replicas": 100,
        "options": {"function": {"window": [0, 1], "table": [0, 0, 0, 1]}},
    },
    "qv": {
        "model": {"asymmetry": 0.0, "scale": 64, "horizon": 0.1},
        "test_functions": _HER0,
        "grids": {"n": [64], "t": [0.1]},
        "replicas": 300,
        "options": {"compare_asymmetry": None},
    },
    "energy": {
        "model": {"asymmetry": 1.0, "scale": 64, "horizon": 0.4},
        "test_functions": ["hermite:0", "hermite:2", "hermite:3"],
        "grids": {"t": [0.05, 0.1, 0.2, 0.4], "eps": [0.5, 0.25, 0.125]},
        "replicas": 200,
        "options": {"ec1_times": [0.1, 0.2, 0.4]},
    },
    "holder": {
        "model": {"asymmetry": 1.0, "scale": 64, "horizon": 0.4},
        "test_functions": ["hermite:0", "hermite:2", "hermite:3"],
        "grids": {"t": [0.05, 0.1, 0.2, 0.4], "eps": [0.5, 0.25, 0.125]},
        "replicas": 200,
        "options": {"ec1_times": [0.1, 0.2, 0.4]},
    },
    "ou-compare": {
        "model": {"asymmetry": 0.0, "scale": 32, "horizon": 1.0},
        "test_functions": _HER0,
        "grids": {"t": [1.0]},
        "replicas": 800,
        "options": {"translates": [-12.0, -4.0, 4.0, 12.0], "modes": 256},
    },
    "fm": {
        "model": {"asymmetry": 1.0, "scale": 32, "ring_mult": 64, "horizon": 0.1},
        "grids": {"M": [1, 2, 4, 8], "t": [0.1]},
        "replicas": 200,
    },
}


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def build_config(document: dict) -> ExperimentConfig:
    """Overlay a user document on the named experiment's defaults and validate."""
    name = document.get("experiment")
    if name not in DEFAULTS:
        raise InputError(f"unknown experiment {name!r}; choose one of {', '.join(EXPERIMENTS)}")
    return ExperimentConfig.model_validate(_merge(DEFAULTS[name], document))


def load_config(path: str) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise InputError("config must be a JSON object")
    return doc
