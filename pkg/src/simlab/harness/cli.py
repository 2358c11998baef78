"""Command line entry point: ``simlab <experiment> --config path`` and ``simlab report dir``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from pydantic import ValidationError

from ..errors import InputError, ModelError, PositivityLossError, PreconditionError, ResourceError
from .config import EXPERIMENTS, build_config, load_config
from .report import MissingResults, render, summarize
from .runner import run_experiment

EXIT_PASS, EXIT_FAIL, EXIT_INVALID, EXIT_RESOURCE = 0, 1, 2, 3

log = logging.getLogger("simlab")

OVERRIDES = {
    "n": ("model", "scale"),
    "ring_mult": ("model", "ring_mult"),
    "rho": ("model", "density"),
    "a": ("model", "asymmetry"),
    "T": ("model", "horizon"),
    "modes": ("options", "modes"),
    "dx": ("options", "dx"),
    "dt": ("options", "dt"),
    "L_mac": ("options", "L"),
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simlab", description="Run an experiment or summarize a results directory.")
    p.add_argument("experiment", choices=EXPERIMENTS + ("report",))
    p.add_argument("target", nargs="?", help="results directory (report only)")
    p.add_argument("--config", help="JSON experiment config; defaults apply to omitted fields")
    p.add_argument("--seed", type=int)
    p.add_argument("--replicas", type=int)
    p.add_argument("--out")
    p.add_argument("--n", type=int)
    p.add_argument("--ring-mult", dest="ring_mult", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--modes", type=int)
    p.add_argument("--dx", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--L-mac", dest="L_mac", type=float)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _fail(code: int, kind: str, message: str) -> int:
    print(json.dumps({"status": "error", "kind": kind, "reason": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.experiment == "report":
        try:
            rows, code = summarize(args.target or args.out or "results")
        except MissingResults as exc:
            print(str(exc), file=sys.stderr)
            return 4
        print(render(rows))
        return code
    try:
        doc = load_config(args.config) if args.config else {}
        if doc.get("experiment", args.experiment) != args.experiment:
            raise InputError(f"config names experiment {doc['experiment']!r}, command line {args.experiment!r}")
        doc["experiment"] = args.experiment
        for key in ("seed", "replicas", "out"):
            if getattr(args, key) is not None:
                doc[key] = getattr(args, key)
        for key, (section, field) in OVERRIDES.items():
            if getattr(args, key) is not None:
                doc.setdefault(section, {})[field] = getattr(args, key)
        cfg = build_config(doc)
        outcome, path = run_experiment(cfg)
    except ValidationError as exc:
        return _fail(EXIT_INVALID, "validation", str(exc))
    except (InputError, ModelError, PreconditionError, json.JSONDecodeError, FileNotFoundError) as exc:
        return _fail(EXIT_INVALID, type(exc).__name__, str(exc))
    except (ResourceError, PositivityLossError, MemoryError) as exc:
        return _fail(EXIT_RESOURCE, type(exc).__name__, str(exc))
    for c in outcome.checks:
        tag = "PASS" if c.passed else "FAIL"
        crit = f"[{c.criterion}] " if c.criterion else ""
        print(f"{tag} {crit}{c.name}: {c.measured:.6g} (want {c.expected})")
    print(f"artifacts: {path}")
    return EXIT_PASS if outcome.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
