import csv
import io
import json
import subprocess
import sys

import pytest

from uwenergy.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    data = [r for r in rows if r[0] != "#check"]
    checks = {r[1]: r[2] for r in rows if r[0] == "#check"}
    return data[0], data[1:], checks


def test_freq_default(capsys):
    code, out, _ = run(capsys, "freq")
    assert code == 0
    assert "\r\n" in out
    header, rows, checks = parse_csv(out)
    assert len(rows) == 50
    assert header[0].startswith("d")
    f = [float(r[1]) for r in rows]
    assert all(a > b for a, b in zip(f, f[1:]))
    assert checks and all(v == "pass" for v in checks.values())


def test_freq_bad_range(capsys):
    code, _, err = run(capsys, "freq", "--d-min", "50")
    assert code == 2 and "distance range" in err


def test_solve_default(capsys):
    code, out, _ = run(capsys, "solve")
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == 1
    assert payload["selected"] == "Case2Approx"
    assert payload["relative_error_Eb_percent"] <= 0.05
    assert {c["case"] for c in payload["cases"]} == {"Case1", "Case2Approx", "Case3", "Case4"}
    assert payload["inputs"] == {"d_m": 10000.0, "P_acc0": 0.98}


def test_solve_rejects_threshold(capsys):
    code, out, err = run(capsys, "solve", "--pacc0", "0.4")
    assert code == 2 and out == ""
    assert "0.4" in err and "P_acc0" in err


def test_solve_csv(capsys):
    code, out, _ = run(capsys, "solve", "--format", "csv", "--d", "1000", "--pacc0", "0.99")
    header, rows, checks = parse_csv(out)
    assert code == 0 and len(rows) == 4 and "case" in header
    assert checks["case1_feasible"] == "pass"


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"schema": 1, "d": 2000, "pacc0": 0.95, "env": {"mu": 8, "tau": 8}}))
    _, out, _ = run(capsys, "solve", "--config", str(cfg))
    p = json.loads(out)
    assert p["inputs"] == {"d_m": 2000, "P_acc0": 0.95}
    assert p["env"]["mu"] == 8
    _, out, _ = run(capsys, "solve", "--config", str(cfg), "--d", "3000", "--mu", "4")
    p = json.loads(out)
    assert p["inputs"]["d_m"] == 3000.0 and p["inputs"]["P_acc0"] == 0.95
    assert p["env"]["mu"] == 4 and p["env"]["tau"] == 8


def test_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"env": {"depth_m": 3}}))
    assert run(capsys, "solve", "--config", str(bad))[0] == 2
    bad.write_text(json.dumps({"schema": 2}))
    assert run(capsys, "solve", "--config", str(bad))[0] == 2
    bad.write_text("{not json")
    assert run(capsys, "solve", "--config", str(bad))[0] == 2
    assert run(capsys, "solve", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_simulate_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ("simulate", "--trials", "20000", "--seed", "7")
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    p = json.loads(a.read_text())
    assert p["report"]["trials"] == 20000 and all(p["checks"].values())


def test_simulate_bit_mode(capsys):
    code, out, _ = run(capsys, "simulate", "--trials", "2000", "--mode", "bit")
    p = json.loads(out)
    assert code == 0 and p["design"]["L_bits"] == round(p["design"]["L_bits"])


def test_simulate_single_trial(capsys):
    code, out, _ = run(capsys, "simulate", "--trials", "1")
    p = json.loads(out)
    assert code == 0
    assert p["report"]["degenerate_stderr"] is True
    assert p["report"]["P_acc_stderr"] is None and p["checks"] == {}


def test_figdata_small(capsys):
    code, out, _ = run(capsys, "figdata", "fig7", "--points", "5", "--pacc0", "0.98")
    header, rows, checks = parse_csv(out)
    assert code == 0 and len(rows) == 5
    assert all(v == "pass" for v in checks.values())
    code, out, _ = run(capsys, "figdata", "fig4", "--points", "4", "--format", "json")
    sweep = json.loads(out)
    assert code == 0 and sweep["schema"] == 1 and len(sweep["rows"]) == 4


def test_figdata_json_round_trip(tmp_path, capsys):
    out = tmp_path / "fig5.json"
    code, _, _ = run(capsys, "figdata", "fig5", "--points", "3", "--format", "json", "--out", str(out))
    sweep = json.loads(out.read_text())
    assert code == 0
    assert json.loads(json.dumps(sweep)) == sweep
    assert len(sweep["rows"]) == 9 and len(sweep["columns"]) == len(sweep["rows"][0])


def test_entry_point_module():
    res = subprocess.run([sys.executable, "-m", "uwenergy.cli", "freq", "--points", "3"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert len(res.stdout.strip().splitlines()) >= 4
