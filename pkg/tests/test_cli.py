from __future__ import annotations

import json
import subprocess
import sys

import pytest

from strata.cli import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, EXIT_UNDECIDED, SCHEMA, main
from strata.corpus import CORPUS_NAMES, corpus_text


@pytest.fixture
def files(tmp_path):
    out = {}
    for name in CORPUS_NAMES:
        p = tmp_path / f"{name}.alg"
        p.write_text(corpus_text(name))
        out[name] = str(p)
    semi = tmp_path / "semi.alg"
    semi.write_text("field Q\nvertices 1 2\n")
    out["semi"] = str(semi)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def report(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


def test_info(capsys, files):
    code, rep = report(capsys, "info", files["ex43"])
    assert code == EXIT_PASS
    assert rep["schema"] == SCHEMA and rep["status"] == "pass"
    assert rep["results"]["dim"] == 13
    code, rep = report(capsys, "info", files["ex414"])
    assert rep["results"]["dim"] == 11
    code, rep = report(capsys, "info", files["semi"])
    assert rep["results"]["dim"] == 2


def test_strata(capsys, files):
    code, rep = report(capsys, "strata", files["ex43"])
    rows = rep["results"]["strata"]
    assert rows[1]["proper_standard"]["dims"] == [1, 1, 0]
    assert all(r["standard"]["stone"] for r in rows)
    assert all(r["proper_standard"]["brick"] for r in rows)
    code, rep = report(capsys, "strata", files["ex414"])
    assert rep["results"]["strata"][2]["proper_standard"]["dims"] == [0, 1, 1]
    code, rep = report(capsys, "strata", files["semi"])
    for r in rep["results"]["strata"]:
        assert r["standard"]["dims"] == r["proper_standard"]["dims"]


def test_check_all(capsys, files):
    code, rep = report(capsys, "check", files["ex43"], "--all")
    assert code == EXIT_PASS
    assert "dpd" in rep["results"]["passing"] and "ddd" not in rep["results"]["passing"]
    code, rep = report(capsys, "check", files["semi"], "--all")
    assert rep["results"]["passing"] == ["dd"]


def test_check_single_choice(capsys, files):
    code, rep = report(capsys, "check", files["ex414"], "--choice", "p,d,p")
    assert code == EXIT_PASS and rep["results"]["mixed_stratified"]
    code, rep = report(capsys, "check", files["ex43"], "--choice", "d,d,d")
    assert code == EXIT_FAIL and rep["status"] == "fail"


def test_system_and_cosystem(capsys, files):
    code, rep = report(capsys, "system", files["ex43"], "--choice", "d,p,d")
    assert code == EXIT_PASS
    code, rep = report(capsys, "system", files["ex414"], "--choice", "p,d,p", "--cosystem")
    assert code == EXIT_PASS and rep["results"]["kind"] == "cosystem"
    code, rep = report(capsys, "system", files["semi"], "--choice", "d,d")
    assert code == EXIT_PASS


def test_ringel(capsys, files):
    code, rep = report(capsys, "ringel", files["ex414"], "--choice", "p,d,p")
    assert code == EXIT_PASS
    assert rep["results"]["dual"]["arrow_counts"] == [[1, 0, 0], [1, 0, 2], [0, 1, 0]]
    assert rep["results"]["cogenerator"]["wakamatsu"] == "verified up to caps"
    code, rep = report(capsys, "ringel", files["ex43"], "--choice", "d,d,d")
    assert code == EXIT_FAIL


def test_univext_kronecker(capsys, files):
    code, rep = report(capsys, "univext", files["kron"], "M", "M", "--cap", "8")
    assert code == EXIT_UNDECIDED and rep["status"] == "cap_exceeded"
    dims = rep["results"]["dims"]
    assert dims[:2] == [[1, 1], [2, 2]]
    totals = rep["results"]["total_dims"]
    assert all(a < b for a, b in zip(totals, totals[1:]))


def test_univext_stabilizes(capsys, files):
    code, rep = report(capsys, "univext", files["ex43"], "S(3)", "Delta(2)")
    assert code == EXIT_PASS and rep["results"]["status"] == "stabilized"


def test_deterministic_output(capsys, files):
    _, first, _ = run(capsys, "ringel", files["ex414"], "--choice", "p,d,p")
    _, second, _ = run(capsys, "ringel", files["ex414"], "--choice", "p,d,p")
    assert first == second


def test_json_file_output(capsys, files, tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "check", files["ex43"], "--all", "--json", str(out))
    assert code == EXIT_PASS
    assert stdout.strip() == "check: pass"
    rep = json.loads(out.read_text())
    assert rep["command"] == "check" and rep["inputs"]["all"] is True


def test_config_file(capsys, files, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"cap": 2}))
    code, rep = report(capsys, "univext", files["kron"], "M", "M", "--config", str(cfg))
    assert rep["results"]["cap"] == 2 and rep["results"]["steps"] == 2
    assert rep["inputs"]["config"] == {"cap": 2}
    cfg.write_text(json.dumps({"bogus": 1}))
    code, out, err = run(capsys, "info", files["kron"], "--config", str(cfg))
    assert code == EXIT_INPUT and out == ""


@pytest.mark.parametrize(
    "argv",
    [
        ("info", "/nonexistent/file.alg"),
        ("univext", "KRON", "P(9)", "S(1)"),
        ("check", "EX43", "--choice", "d,x,d"),
        ("check", "EX43", "--choice", "d,d"),
        ("info", "EX43", "--field", "F4"),
        ("univext", "EX43", "Nope", "S(1)"),
    ],
)
def test_input_errors(capsys, files, argv):
    argv = [files[a.lower()] if a in ("KRON", "EX43") else a for a in argv]
    code, out, err = run(capsys, *argv)
    assert code == EXIT_INPUT
    assert out == "" and err.startswith("strata: error:")


def test_parse_error_reports_line(capsys, tmp_path):
    bad = tmp_path / "bad.alg"
    bad.write_text("field Q\nvertices 1 2\narrow a : 1 -> 7\n")
    code, out, err = run(capsys, "info", str(bad))
    assert code == EXIT_INPUT and "3" in err


def test_field_override(capsys, files):
    code, rep = report(capsys, "info", files["ex43"], "--field", "F2")
    assert rep["inputs"]["field"] == rep["results"]["field"]
    assert rep["results"]["dim"] == 13


def test_console_script(files):
    proc = subprocess.run([sys.executable, "-m", "strata.cli", "info", files["kron"]], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["dim"] == 4
