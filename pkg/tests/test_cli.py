from __future__ import annotations

import json
import subprocess
import sys

import pytest

from localdt import cli
from localdt.algebra import ONE, T1, T2, QSeries, macmahon_neg
from localdt.partitions import Partition
from localdt.vertex import hook_product_series

from conftest import assert_series_equal, q, sympy_series, t2

SIGMA = T1 + T2


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def series_from_json(out: str) -> QSeries:
    return QSeries.from_json(json.loads(out)["series"])


def test_cap_command(capsys):
    code, out, _ = run(capsys, "dt", "--genus", "0", "--level", "-1,0", "--cap", "2,1", "--qmax", "8",
                       "--format", "json")
    assert code == cli.EXIT_OK
    want = sympy_series(1 / (2 * t2 ** 2) / ((1 + q) * (1 - q ** 2)), 8)
    assert_series_equal(series_from_json(out), want)


def test_degree_zero_commands(capsys):
    code, out, _ = run(capsys, "dt", "--genus", "0", "--level", "0,0", "--insertions", "", "--degree", "0",
                       "--qmax", "5", "--format", "json")
    assert code == cli.EXIT_OK
    assert_series_equal(series_from_json(out), macmahon_neg(5).power(-2 * SIGMA ** 2 / (T1 * T2)))
    code, out, _ = run(capsys, "dt", "--degree", "0", "--qmax", "0")
    assert code == cli.EXIT_OK
    assert QSeries.from_text(out.strip()) == QSeries.constant(ONE, 0)


def test_starred_output(capsys):
    code, out, _ = run(capsys, "dt", "--level", "-1,0", "--cap", "1", "--qmax", "4", "--starred", "--format", "json")
    assert code == cli.EXIT_OK
    data = json.loads(out)["starred"]
    assert data["half_power"] == 1


def test_vertex_commands(capsys):
    code, out, _ = run(capsys, "vertex", "--degree", "1", "--qmax", "3", "--frame", "custom", "--weights", "1,2,3")
    assert code == cli.EXIT_OK
    assert out.strip() == "(1,): q^0*(1) + q^1*(5) + q^2*(10) + q^3*(10); O(q^4)"
    code, out, _ = run(capsys, "vertex", "--degree", "2", "--cy", "--qmax", "10", "--format", "json")
    assert code == cli.EXIT_OK
    for entry in json.loads(out)["vertices"]:
        got = QSeries.from_json(entry["series"])
        assert_series_equal(got, hook_product_series(Partition(entry["profile"]), 10))
    code, out, _ = run(capsys, "vertex", "--degree", "0")
    assert out.strip() == "(): q^0*(1); O(q^7)"


def test_standard_frame_degree_one(capsys):
    code, out, _ = run(capsys, "vertex", "--degree", "1", "--qmax", "2", "--format", "json")
    series = QSeries.from_json(json.loads(out)["vertices"][0]["series"])
    assert series[1] == SIGMA / cli.vertex.S


@pytest.mark.parametrize("suite, dmax", [("additivity", "5"), ("cy-vertex", "4"), ("tqft-gluing", "3")])
def test_check_commands_pass(capsys, suite, dmax):
    qmax = "10" if suite == "cy-vertex" else "6"
    code, out, _ = run(capsys, "check", suite, "--dmax", dmax, "--qmax", qmax)
    assert code == cli.EXIT_OK
    assert json.loads(out) == {"passed": True, "suites": [{"name": suite, "passed": True, "detail": ""}]}


def test_failing_check_exits_with_three(capsys, monkeypatch):
    monkeypatch.setitem(cli.SUITES, "macmahon", (lambda dmax, qmax: cli.CheckResult("macmahon", False, "x"), 0))
    code, out, _ = run(capsys, "check", "macmahon", "--format", "text")
    assert code == cli.EXIT_CHECK
    assert out.strip() == "FAIL macmahon: x"


@pytest.mark.parametrize("argv", [
    ["dt", "--degree", "2", "--cap", "2,1"],
    ["dt", "--level", "x"],
    ["dt", "--cap", "1,2"],
    ["dt", "--cap", "1", "--insertions", "1"],
    ["dt", "--qmax", "-1"],
    ["vertex", "--degree", "1", "--frame", "custom"],
    ["check", "no-such-suite"],
    [],
])
def test_usage_errors(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == cli.EXIT_USAGE
    assert out == ""


def test_computation_error_reports_json_on_stderr(capsys):
    code, out, err = run(capsys, "vertex", "--degree", "1", "--frame", "custom", "--weights", "0,t1,t2", "--qmax", "2")
    assert code == cli.EXIT_COMPUTE
    assert out == ""
    assert json.loads(err)["error"] == "ZeroDivisionError"


def test_output_is_deterministic(capsys):
    argv = ["dt", "--genus", "1", "--level", "-1,0", "--insertions", "2;1,1", "--qmax", "4", "--format", "json"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_json_round_trip_of_emitted_series(capsys):
    _, out, _ = run(capsys, "dt", "--genus", "2", "--level", "0,-1", "--insertions", "2", "--qmax", "4",
                    "--format", "json")
    series = series_from_json(out)
    assert json.loads(series.dumps()) == json.loads(out)["series"]
    _, text, _ = run(capsys, "dt", "--genus", "2", "--level", "0,-1", "--insertions", "2", "--qmax", "4")
    assert QSeries.from_text(text.strip()) == series


def test_progress_goes_to_stderr():
    proc = subprocess.run([sys.executable, "-m", "localdt", "-v", "dt", "--degree", "1", "--qmax", "2"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.strip().startswith("q^")
    assert "DT(0|0,0)" in proc.stderr
