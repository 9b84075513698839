from __future__ import annotations

import json
import subprocess
import sys

import pytest

from chowcalc.cli import main, monomial_key


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--output", "json")
    return code, json.loads(out)


def test_monomial_keys():
    assert monomial_key((0, 0)) == "1"
    assert monomial_key((2, 0, 1)) == "H1^2*H3^1"


def test_cy_quintic_json(capsys):
    code, doc = run_json(capsys, "cy", "--degrees", "5", "--dim", "3", "--with-p")
    assert code == 0
    res = doc["results"]
    assert res["N"] == "120"
    assert res["a"] == ["24", "58", "37", "6"]
    assert res["gamma_coeff"] == "1/120"
    checks = {c["name"]: c for c in doc["checks"]}
    assert checks["point_slice[0,3,3]"]["pass"] is True
    assert checks["point_slice[0,3,3]"]["lhs"] == "-6"
    assert checks["point_slice[1,2,3]"]["lhs"] == "-19"
    assert all(c["pass"] is not False for c in doc["checks"])


def test_cy_from_chern_classes(capsys):
    code, doc = run_json(capsys, "cy", "--chern", "6,9", "-n", "3")
    assert code == 0
    assert doc["results"]["N"] == "36"


def test_json_is_deterministic(capsys):
    _, first, _ = run(capsys, "cy", "--degrees", "3,3", "-n", "3", "--output", "json")
    _, second, _ = run(capsys, "cy", "--degrees", "3,3", "-n", "3", "--output", "json")
    assert first == second
    assert json.dumps(json.loads(first), sort_keys=True, indent=2) == first.rstrip("\n")


def test_hyp(capsys):
    code, doc = run_json(capsys, "hyp", "-n", "3", "-d", "6")
    assert code == 0
    assert doc["results"]["lambda1"] == "720"
    assert doc["results"]["gamma_empty"] is True


def test_text_report(capsys):
    code, out, _ = run(capsys, "hyp", "-n", "3", "-d", "5")
    assert code == 0
    assert "PASS" in out and "FAIL" not in out


@pytest.mark.parametrize("suite", ["stirling", "isolated", "schubert", "gamma", "rewrite"])
def test_verify_suites(capsys, suite):
    code, doc = run_json(capsys, "verify", "--suite", suite)
    assert code == 0
    assert doc["checks"] and all(c["pass"] for c in doc["checks"])


def test_lines(capsys):
    code, doc = run_json(capsys, "lines", "--degrees", "5", "--ambient", "4")
    assert code == 0
    assert doc["results"]["count"] == "2875"
    code, doc = run_json(capsys, "lines", "--degrees", "3", "--ambient", "3")
    assert doc["results"]["count"] == "27"


def test_partitions(capsys):
    code, doc = run_json(capsys, "partitions", "-r", "3", "-s", "2")
    assert code == 0
    assert doc["results"]["partitions"] == ["001", "010", "011"]


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code = main(["partitions", "-r", "4", "-s", "2", "--output", "json", "--out", str(target)])
    assert code == 0
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["command"] == "partitions"


@pytest.mark.parametrize("argv", [
    ["cy", "--degrees", "4", "-n", "3"],  # not Calabi-Yau
    ["cy", "--degrees", "5", "--chern", "5", "-n", "3"],  # mutually exclusive
    ["cy", "-n", "3"],  # no bundle
    ["hyp", "-n", "3", "-d", "4"],  # d too small
    ["partitions", "-r", "2", "-s", "3"],
    ["cy", "--degrees", "x", "-n", "3"],
    ["nonsense"],
])
def test_usage_errors_exit_one(capsys, argv):
    assert main(argv) == 1
    assert capsys.readouterr().err


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "usage" in capsys.readouterr().out


def test_k_cap_from_environment(capsys, monkeypatch):
    monkeypatch.delenv("CHOWCALC_MAX_K", raising=False)
    assert main(["hyp", "-n", "3", "-d", "9"]) == 1
    assert "CHOWCALC_MAX_K" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "chowcalc", "partitions", "-r", "3", "-s", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "012" in proc.stdout
