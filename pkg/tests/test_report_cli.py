import json
import subprocess
import sys

import pytest

from conftest import DATA, fixture_path, load
from efa.cli import main
from efa.io import parse_input
from efa.report import AnalysisConfig, analyze, report_from_json, report_to_json, verify_report
from efa.series import InputValidationError

FIXTURES = sorted(p.stem for p in DATA.glob("*.json"))
QUICK = AnalysisConfig(corroborate=False, series_check_order=80, residual_order=60)


@pytest.mark.parametrize("name", FIXTURES)
def test_round_trip_and_verify(name):
    rep = analyze(load(name), QUICK)
    assert rep.status == "complete"
    doc = report_to_json(rep)
    text = json.dumps(doc, sort_keys=True)
    again = report_to_json(report_from_json(json.loads(text)))
    assert json.dumps(again, sort_keys=True) == text
    checks = verify_report(json.loads(text))
    assert checks and all(c.ok for c in checks), [c for c in checks if not c.ok]


def test_tampered_value_fails_verification():
    doc = report_to_json(analyze(load("central_binomial"), QUICK))
    rec = doc["exceptional"][1]
    assert rec["value_element"] == "1/2"
    rec["value_element"] = "1/3"
    rec["value"] = {"min_poly": ["-1/3", "1"], "box": {"re": "1/3", "im": "0", "radius": "0"}, "approx": "1/3"}
    failed = {c.name for c in verify_report(doc) if not c.ok}
    assert "point 0: cokernel test for f" in failed


def test_analyze_summary_exit_zero(capsys):
    assert main(["analyze", str(fixture_path("central_binomial")), "--no-corroborate"]) == 0
    out = capsys.readouterr().out
    assert "exceptional set: {(0, 0), (1, 1/2)}" in out
    assert "transcendental" in out


def test_emit_and_verify(tmp_path, capsys):
    cert = tmp_path / "rep.json"
    src = str(fixture_path("gaussian"))
    assert main(["analyze", src, "--emit-certificate", str(cert)]) == 0
    capsys.readouterr()
    assert main(["analyze", src, "--verify", str(cert)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 8
    assert main(["analyze", str(fixture_path("exp")), "--verify", str(cert)]) == 4


def test_exceptional_derivative_command(capsys):
    assert main(["exceptional", str(fixture_path("two_exponentials")), "--derivative", "1"]) == 0
    assert "(-1, 0)" in capsys.readouterr().out
    assert main(["exceptional", str(fixture_path("two_exponentials")), "--derivative", "9"]) == 2


def test_min_commands(capsys):
    assert main(["min-op", str(fixture_path("exp_nonminimal"))]) == 0
    assert "order 1" in capsys.readouterr().out
    assert main(["min-inhom", str(fixture_path("polynomial"))]) == 0
    out = capsys.readouterr().out
    assert "s = 0" in out and "verdict: polynomial" in out


def test_iteration_cap_gives_partial_report(capsys):
    code = main(["analyze", str(fixture_path("shifted_exp")), "--iteration-cap", "0", "--json"])
    assert code == 3
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] != "complete" and "iteration_cap_exceeded" in doc["flags"]


def _write(tmp_path, doc):
    p = tmp_path / "in.json"
    p.write_text(json.dumps(doc))
    return str(p)


def test_invalid_inputs_exit_two(tmp_path, capsys):
    base = json.loads(fixture_path("exp").read_text())
    assert main(["analyze", _write(tmp_path, {**base, "oracle": False})]) == 2
    assert "oracle" in capsys.readouterr().err
    assert main(["analyze", _write(tmp_path, {**base, "initial_coeffs": []})]) == 2
    assert main(["analyze", _write(tmp_path, {**base, "initial_coeffs": [0.5]})]) == 2
    assert main(["analyze", str(tmp_path / "missing.json")]) == 2
    (tmp_path / "broken.json").write_text("{not json")
    assert main(["analyze", str(tmp_path / "broken.json")]) == 2


def test_missing_oracle_key_names_the_clause(tmp_path):
    base = json.loads(fixture_path("exp").read_text())
    del base["oracle"]
    with pytest.raises(InputValidationError) as e:
        parse_input(_write(tmp_path, base))
    assert e.value.clause == "oracle"


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "efa.cli", "min-op", str(fixture_path("exp"))],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "order 1" in res.stdout
