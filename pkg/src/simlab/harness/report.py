"""Acceptance summary over a results directory."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

from ..errors import SimlabError
from .config import EXPERIMENTS

CRITERIA = {
    "1": ("tiny-ring oracle", ("stationarity",)),
    "2": ("conservation and continuity", ("stationarity",)),
    "3": ("stationary white noise", ("whitenoise",)),
    "4": ("equivalence of ensembles", ("eoe",)),
    "5": ("spectral gap and H-1 norm", ("gap",)),
    "6": ("second-order Boltzmann-Gibbs", ("bg2",)),
    "7": ("first-order Boltzmann-Gibbs rate", ("bg1",)),
    "8": ("energy and Hoelder scaling", ("holder", "energy")),
    "9": ("quadratic variation", ("qv",)),
    "10": ("Cole-Hopf cross-validation", ("she-compare",)),
    "11": ("Ornstein-Uhlenbeck autocovariance", ("ou-compare",)),
    "12": ("height field", ("height",)),
}

EXIT_PASS, EXIT_FAIL, EXIT_INCOMPLETE = 0, 1, 4


class MissingResults(SimlabError):
    pass


@dataclass
class Row:
    criterion: str
    title: str
    status: str  # pass, fail, not run
    detail: str


def _read_checks(root: str) -> dict[str, list[dict]]:
    found = {}
    for name in EXPERIMENTS:
        path = os.path.join(root, name, "checks.csv")
        if os.path.exists(path) and os.path.exists(os.path.join(root, name, "manifest.json")):
            with open(path, newline="") as fh:
                found[name] = list(csv.DictReader(fh))
    return found


def summarize(root: str) -> tuple[list[Row], int]:
    found = _read_checks(root) if os.path.isdir(root) else {}
    if not found:
        raise MissingResults(
            f"no experiment results under {root!r}; run any of: {', '.join(EXPERIMENTS)}"
        )
    rows, any_fail, any_missing = [], False, False
    for cid, (title, needed) in CRITERIA.items():
        missing = [e for e in needed if e not in found]
        checks = [c for e in needed if e in found for c in found[e] if c["criterion"] == cid]
        failed = [c for c in checks if c["passed"] != "true"]
        if missing:
            status = "not run"
            detail = "run: " + ", ".join(missing)
            any_missing = True
            if failed:
                status = "fail"
                any_fail = True
        elif failed:
            status, any_fail = "fail", True
            detail = "; ".join(f"{c['name']}: {float(c['measured']):.4g} (want {c['expected']})" for c in failed)
        else:
            status = "pass"
            detail = "; ".join(f"{c['name']}: {float(c['measured']):.4g}" for c in checks)
        rows.append(Row(cid, title, status, detail))
    code = EXIT_FAIL if any_fail else EXIT_INCOMPLETE if any_missing else EXIT_PASS
    return rows, code


def render(rows: list[Row]) -> str:
    width = max(len(r.title) for r in rows)
    lines = [f"{'#':>3}  {'criterion':<{width}}  {'status':<8}  detail"]
    for r in rows:
        lines.append(f"{r.criterion:>3}  {r.title:<{width}}  {r.status:<8}  {r.detail}")
    return "\n".join(lines)
