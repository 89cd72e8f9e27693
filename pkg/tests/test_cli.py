from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from binomsums.cli import cli_main


def run(*argv):
    out = io.StringIO()
    code = cli_main(list(argv), out)
    return code, out.getvalue()


def test_eval_s4():
    code, out = run("eval", "--family", "s", "--n", "4", "--digits", "30")
    assert code == 0
    assert "0.529154857165146540082127724754" in out
    assert "-4*ln2*z3 + 2*ln2^2*z2 - 2/3*ln2^4 + 9/4*z4" in out


def test_eval_json():
    code, out = run("eval", "--family", "LIN_h", "--n", "3", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["converged"] == "true"
    assert data["family"] == "LIN_h:3"


def test_eval_nonconvergence_exit_3():
    code, out = run("eval", "--family", "S", "--n", "1", "--digits", "60", "--terms", "100")
    assert code == 3
    assert "reason" in out


def test_closed_form_commands():
    code, out = run("closed-form", "--family", "W", "--n", "1")
    assert code == 0 and "45/16*z4" in out
    code, out = run("closed-form", "--parse", "z3 + 1/2*pi", "--format", "csv")
    assert code == 0
    assert out.splitlines()[1].startswith("1/2*pi + z3,")


def test_closed_form_parse_error(capsys):
    code, _ = run("closed-form", "--parse", "z1")
    assert code == 2
    assert "zeta(1) diverges" in capsys.readouterr().err


def test_lemma_exact():
    code, out = run("lemma", "--id", "1", "--k", "500")
    assert code == 0
    assert "exact" in out
    code, out = run("lemma", "--id", "3", "--k", "2", "--format", "json")
    assert json.loads(out)["value"] == "-1/3 + 1/4*pi"


def test_lemma2_numeric():
    code, out = run("lemma", "--id", "2", "--k", "2", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["value"] == "71/36 - 8/3*ln2"
    assert float(data["residual"]) < 1e-20


def test_logsine():
    code, out = run("logsine", "--n", "3", "--theorem1", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["converged"] == "true"
    assert float(data["theorem1_residual"]) < 1e-20


def test_verify_and_report(tmp_path):
    path = tmp_path / "r.json"
    code, out = run("verify", "--target", "S:3", "--target", "ls4", "--format", "json", "--output", str(path))
    assert code == 0
    assert json.loads(out)["summary"] == {"pass": 2, "fail": 0, "disputed": 0}
    assert path.read_text() == out
    code, out = run("report", "--input", str(path), "--format", "text")
    assert code == 0 and "2 passed" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--family", "S", "--n", "4", "--digits", "9"],
        ["eval", "--family", "S", "--n", "4", "--tol", "abc"],
        ["eval", "--family", "Q", "--n", "1"],
        ["eval", "--family", "S", "--n", "0"],
        ["verify", "--target", "S:99"],
        ["verify", "--all", "--format", "xml"],
        ["lemma", "--id", "5", "--k", "3"],
        ["lemma", "--id", "1", "--k", "0"],
        ["closed-form", "--family", "S", "--n", "8"],
        ["report", "--input", "/nonexistent/report.json"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def cli(*argv):
    return subprocess.run([sys.executable, "-m", "binomsums", *argv], capture_output=True, text=True)


def test_subprocess_exit_codes(tmp_path):
    ok = cli("verify", "--target", "Z:1", "--digits", "20")
    assert ok.returncode == 0, ok.stderr
    assert cli("eval", "--family", "S", "--n", "1", "--digits", "60", "--terms", "100").returncode == 3
    assert cli("eval", "--digits", "5", "--family", "S").returncode == 2
    # a saved report with a failing record replays as exit 1
    good = json.loads(cli("verify", "--target", "Z:1", "--digits", "20", "--format", "json").stdout)
    good["records"][0]["pass"] = False
    good["summary"] = {"pass": 0, "fail": 1, "disputed": 0}
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(good))
    assert cli("report", "--input", str(p)).returncode == 1


def test_byte_identical_json_modulo_timing():
    a = cli("verify", "--target", "V:2", "--target", "lemma:3", "--digits", "20", "--format", "json")
    b = cli("verify", "--target", "V:2", "--target", "lemma:3", "--digits", "20", "--format", "json", "--jobs", "2")
    strip = lambda s: [{k: v for k, v in r.items() if k != "elapsed_ms"} for r in json.loads(s)["records"]]  # noqa: E731
    assert strip(a.stdout) == strip(b.stdout)
