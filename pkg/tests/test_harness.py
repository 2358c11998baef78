import json

import numpy as np

from simlab.farm import Probe, simulate
from simlab.fields import Hermite, activity_integrand, ring_vector
from simlab.harness import build_config
from simlab.harness.cli import main
from simlab.lattice import ModelSpec

SMALL_QV = ["--n", "8", "--ring-mult", "8", "--replicas", "4", "--seed", "17"]


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cheap_experiments_pass(tmp_path, capsys):
    for name in ("verify-model", "eoe", "gap"):
        code, out, _ = run_cli(capsys, name, "--out", str(tmp_path))
        assert code == 0, out
        assert (tmp_path / name / "results.csv").exists()
        manifest = json.loads((tmp_path / name / "manifest.json").read_text())
        assert manifest["passed"] is True and manifest["spec_hash"]


def test_invalid_configs_exit_two(tmp_path, capsys):
    code, _, err = run_cli(capsys, "qv", "--replicas", "1", "--out", str(tmp_path))
    assert code == 2 and json.loads(err)["kind"] == "validation"
    code, _, err = run_cli(capsys, "bg2", "--rho", "0.3", "--out", str(tmp_path))
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "experiment": "qv", "replicas": 10, "typo": 3}')
    assert run_cli(capsys, "qv", "--config", str(bad))[0] == 2
    other = tmp_path / "other.json"
    other.write_text('{"experiment": "gap"}')
    assert run_cli(capsys, "qv", "--config", str(other))[0] == 2
    assert run_cli(capsys, "qv", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_resource_errors_exit_three(tmp_path, capsys):
    cfg = tmp_path / "big.json"
    cfg.write_text(json.dumps({"experiment": "stationarity", "options": {"tiny_ring": 14, "tiny_start": "1" * 7 + "0" * 7}}))
    code, _, err = run_cli(capsys, "stationarity", "--config", str(cfg), "--out", str(tmp_path))
    assert code == 3 and json.loads(err)["kind"] == "ResourceError"


def test_rerun_gives_identical_results(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    run_cli(capsys, "qv", *SMALL_QV, "--out", str(a))
    run_cli(capsys, "qv", *SMALL_QV, "--out", str(b))
    for f in ("results.csv", "checks.csv", "series.jsonl"):
        assert (a / "qv" / f).read_bytes() == (b / "qv" / f).read_bytes()


def test_report_states(tmp_path, capsys):
    code, _, err = run_cli(capsys, "report", str(tmp_path / "empty"))
    assert code == 4 and "gap" in err
    run_cli(capsys, "gap", "--out", str(tmp_path))
    code, out, _ = run_cli(capsys, "report", str(tmp_path))
    assert code == 4
    assert "not run" in out and "pass" in out


def test_config_defaults_and_overrides():
    cfg = build_config({"experiment": "bg2", "replicas": 7, "model": {"scale": 32}})
    assert cfg.replicas == 7 and cfg.model.scale == 32
    assert cfg.model.asymmetry == 1 and cfg.grids.ell
    assert cfg.canonical() == build_config(json.loads(json.dumps(cfg.canonical()))).canonical()


def test_farm_is_invariant_to_worker_count():
    spec = ModelSpec(asymmetry=1.0, scale=8, ring_size=64)
    u = Hermite(1)
    probe = Probe({"Y": ring_vector(u, spec)}, [activity_integrand("QV", spec, u)])
    one = simulate(spec, 3, 5, [0.0, 0.1], probe, workers=1)
    two = simulate(spec, 3, 5, [0.0, 0.1], probe, workers=2)
    for k in one:
        assert np.array_equal(one[k], two[k])
    tail = simulate(spec, 3, 2, [0.0, 0.1], probe, workers=1, first=3)
    assert np.array_equal(tail["Y"], one["Y"][3:])
