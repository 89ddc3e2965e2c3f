from __future__ import annotations

import json

import pytest

from cdc.cli import main
from cdc.config import SCENARIO_SCHEMA, validate_config
from cdc.errors import ConfigError
from cdc.runner import execute


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("cfg, field", [
    ({"generator": {"type": "cycle", "n": 4}, "bogus": 1}, "bogus"),
    ({"generator": {"type": "cycle", "n": "four"}}, "generator.n"),
    ({"generator": {"type": "moebius", "n": 4}}, "generator.type"),
    ({"backend": "group"}, "group"),
    ({}, "generator"),
    ({"generator": {"type": "cycle", "n": 4}, "suites": ["gromov"]}, "suites"),
    ({"generator": {"type": "cycle", "n": 4}, "seed": -1}, "seed"),
])
def test_config_errors_name_field(cfg, field):
    with pytest.raises(ConfigError) as info:
        validate_config(cfg)
    assert info.value.field == field


def test_config_defaults():
    cfg = validate_config({"generator": {"type": "path", "n": 3}})
    assert cfg["backend"] == "markov" and cfg["seed"] == 0 and cfg["suites"] == ["all"]


def test_numbered_suite_aliases(capsys):
    cfg = validate_config({"generator": {"type": "path", "n": 3},
                           "suites": ["lemma22", "theorem02-sweep", "meyer"]})
    assert cfg["suites"] == ["cross-term", "equivalence-sweep", "meyer"]
    code, out, _ = run(["verify", "--generator", '{"type": "cycle", "n": 4}',
                        "--suite", "lemma21", "--samples", "2"], capsys)
    assert code == 0 and list(json.loads(out)["suites"]) == ["shifted-derivative"]


def test_zero_generator_curvature_is_trivial():
    report = execute({"generator": {"type": "explicit", "Q": [[0, 0], [0, 0]]},
                      "suites": ["curvature"]})
    assert report["passed"]
    assert report["suites"]["curvature"]["holds"]


def test_precondition_failure_is_skipped():
    report = execute({"generator": {"type": "star", "n": 5}, "suites": ["theorem01"]})
    assert report["suites"]["duality"]["skipped"]
    assert report["passed"]


def test_run_writes_deterministic_report(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"generator": {"type": "cycle", "n": 5}, "seed": 3,
                               "suites": ["meyer", "hgs", "poisson"], "samples": 8,
                               "curves": True}))
    outs = []
    for name in ("a", "b"):
        code, _, _ = run(["run", str(cfg), "--out", str(tmp_path / name)], capsys)
        assert code == 0
        outs.append((tmp_path / name / "report.json").read_bytes())
    assert outs[0] == outs[1]
    report = json.loads(outs[0])
    assert report["schemaVersion"] == "1.0"
    assert set(report["suites"]) == {"meyer", "hgs", "poisson"}
    assert "createdAt" in json.loads((tmp_path / "a" / "metadata.json").read_text())
    header = (tmp_path / "a" / "curves.csv").read_text().splitlines()[0]
    assert header == "t,bmo,BMO"


def test_run_overrides(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"generator": {"type": "cycle", "n": 4}}))
    code, out, _ = run(["run", str(cfg), "--suite", "averaging", "--seed", "9"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["config"]["seed"] == 9 and list(report["suites"]) == ["averaging"]


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"generator": {"type": "cycle"}, "extra": true}')
    code, _, err = run(["run", str(cfg)], capsys)
    assert code == 2
    assert "extra" in err
    cfg.write_text("{not json")
    code, _, err = run(["run", str(cfg)], capsys)
    assert code == 2 and "config error" in err


def test_failing_suite_exit_code(capsys):
    code, out, _ = run(["group", "--group", '{"type": "quaternion"}',
                        "--suite", "conditional-negativity"], capsys)
    assert code == 1
    assert json.loads(out)["failed"] == ["conditional-negativity"]


def test_group_command(capsys):
    code, out, _ = run(["group", "--group", '{"type": "symmetric", "n": 3}', "--psi", "cocycle",
                        "--suite", "gromov", "--suite", "curvature"], capsys)
    assert code == 0
    assert json.loads(out)["passed"]


def test_verify_command(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["verify", "--generator", '{"type": "path", "n": 4}', "--suite", "meyer",
                      "--samples", "5", "--out", str(out)], capsys)
    assert code == 0
    assert json.loads(out.read_text())["suites"]["meyer"]["metrics"]["integerC"] == 2


def test_norms_command(capsys):
    code, out, _ = run(["norms", "--generator", '{"type": "cycle", "n": 4}',
                        "--field", "[1, 0, -1, 0]"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["bmo"]["value"] <= 1.0 + 1e-12
    assert d["h1G"] <= 2 * d["h1S"] + 1e-10
    code, _, err = run(["norms", "--generator", '{"type": "cycle", "n": 4}', "--delta", "9"],
                       capsys)
    assert code == 2 and "delta" in err


def test_carleson_command(tmp_path, capsys):
    nu = tmp_path / "nu.json"
    nu.write_text(json.dumps({"breakpoints": [0, 1, 2], "densities": [[1, 0, 0], [0, 0, 2]]}))
    code, out, _ = run(["carleson", "--generator", '{"type": "cycle", "n": 3}',
                        "--measure", str(nu), "--samples", "4"], capsys)
    assert code == 0
    d = json.loads(out)
    assert {"carlesonNorm", "empiricalCp", "bmoBoundRatio"} <= set(d)


def test_zoo_and_schema(capsys):
    code, out, _ = run(["zoo", "list"], capsys)
    assert code == 0 and "cycle" in out and "hypercube" in out
    code, out, _ = run(["schema"], capsys)
    assert json.loads(out) == json.loads(json.dumps(SCENARIO_SCHEMA))
