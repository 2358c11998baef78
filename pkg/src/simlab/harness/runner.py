"""Run one configured experiment and write its artifacts."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import asdict

import numpy as np

from .. import __version__
from .config import ExperimentConfig
from .experiments import REGISTRY, Outcome, preflight


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: str, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in columns])


def write_series(path: str, samples: dict, replica_axis: bool = True) -> None:
    """One JSON line per (record, replica): {"name", "replica", "values"}."""
    with open(path, "w") as fh:
        for name in sorted(samples):
            arr = np.atleast_1d(np.asarray(samples[name], float))
            if arr.ndim == 1:
                arr = arr[:, None]
            for r, vals in enumerate(arr):
                fh.write(json.dumps({"name": name, "replica": r, "values": [float(v) for v in vals]}) + "\n")


def experiment_dir(cfg: ExperimentConfig, out: str | None = None) -> str:
    return os.path.join(out or cfg.out, cfg.experiment)


def run_experiment(cfg: ExperimentConfig, out: str | None = None) -> tuple[Outcome, str]:
    """Validate preconditions, run, and write manifest.json, results.csv, checks.csv and series.jsonl."""
    preflight(cfg)
    outcome = REGISTRY[cfg.experiment](cfg)
    d = experiment_dir(cfg, out)
    os.makedirs(d, exist_ok=True)
    manifest = {
        "experiment": cfg.experiment,
        "config": cfg.canonical(),
        "code_version": __version__,
        "spec_hash": cfg.spec().digest(),
        "seed": cfg.seed,
        "passed": outcome.passed,
        "columns": list(outcome.columns),
    }
    with open(os.path.join(d, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_csv(os.path.join(d, "results.csv"), outcome.columns, outcome.rows)
    write_csv(os.path.join(d, "checks.csv"), ("criterion", "name", "measured", "expected", "passed"),
              [asdict(c) for c in outcome.checks])
    write_series(os.path.join(d, "series.jsonl"), outcome.samples)
    return outcome, d
