"""Command-line reports: structure, exit codes and determinism."""

import json

import pytest

from thetalift.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_build_phi_document(capsys):
    code, out, _ = call(capsys, "build-phi", "--p", "3", "--case", "inert", "--n", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "build-phi" and doc["schema"] == 1
    assert doc["config"] == {"kind": "inert", "p": 3, "levels": [1], "N": 2}
    assert doc["artifacts"]["phi"]["phi"]["dim"] == 8


def test_ramified_build_reports_summands(capsys):
    code, out, _ = call(capsys, "build-phi", "--p", "3", "--case", "ramified", "--n", "1")
    doc = json.loads(out)
    assert code == 0 and doc["verdicts"]["summands_disjoint"]["pass"]


def test_bessel_five_halves(capsys):
    code, out, _ = call(capsys, "bessel", "--p", "3", "--case", "ramified", "--n", "0")
    doc = json.loads(out)
    assert code == 0
    assert doc["besselCoefficient"] == "5/2·Z" and doc["nonzero"] is True
    assert doc["artifacts"]["bessel_consistency"]["agree"] is False


def test_bessel_split(capsys):
    code, out, _ = call(capsys, "bessel", "--p", "5", "--case", "split", "--n1", "1", "--n2", "2")
    assert code == 0 and json.loads(out)["besselCoefficient"] == "1/180·Z"


def test_cosets_command(capsys):
    code, out, _ = call(capsys, "cosets", "--p", "3", "--N", "2", "--kind", "K_mod_KT")
    doc = json.loads(out)
    assert code == 0 and doc["artifacts"]["cosets"]["count"] == 16


@pytest.mark.parametrize("argv", [
    ["bessel", "--p", "4", "--case", "inert", "--n", "1"],
    ["bessel", "--p", "3", "--case", "inert"],
    ["bessel", "--p", "3", "--case", "split", "--n1", "1"],
    ["bessel", "--p", "3", "--case", "split", "--n", "1", "--n1", "1"],
    ["bessel", "--p", "3", "--case", "ramified", "--n", "1", "--chi-delta", "1"],
    ["bessel", "--p", "3", "--case", "inert", "--n", "1", "--chi-delta", "-1"],
    ["bessel", "--p", "3", "--case", "cyclic", "--n", "1"],
    ["cosets", "--p", "3", "--N", "1", "--kind", "K_mod_KT"],
    ["nonsense"],
])
def test_config_errors_exit_two(capsys, argv):
    code, out, err = call(capsys, *argv)
    assert code == 2
    assert out == ""
    assert json.loads(err.strip().splitlines()[-1])["error"] == "config"


def test_failing_verdict_exits_one(capsys):
    code, out, _ = call(capsys, "oracle-crosscheck", "--p", "3", "--case", "ramified", "--n", "2")
    doc = json.loads(out)
    assert code == 1 and doc["ok"] is False
    assert doc["verdicts"]["representation"]["pass"] is True
    assert doc["verdicts"]["oracle_crosscheck"]["pass"] is False


def test_crosscheck_passes(capsys):
    code, out, _ = call(capsys, "oracle-crosscheck", "--p", "3", "--case", "inert", "--n", "1")
    assert code == 0 and json.loads(out)["ok"] is True


def test_output_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = call(capsys, "verify-invariance", "--p", "3", "--case", "split",
                        "--n1", "1", "--n2", "0", "--output", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["ok"] is True


def test_full_report_is_deterministic(capsys, tmp_path):
    argv = ["full-report", "--p", "3", "--case", "ramified", "--n", "1", "--seed", "5"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(argv + ["--output", str(a)]) == 0
    assert run(argv + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_timings_are_opt_in(capsys):
    _, out, _ = call(capsys, "fourier", "--p", "3", "--case", "split", "--n1", "0", "--n2", "1")
    assert "timings" not in json.loads(out)
    _, out, _ = call(capsys, "fourier", "--p", "3", "--case", "split", "--n1", "0", "--n2", "1",
                     "--timings")
    assert "timings" in json.loads(out)
