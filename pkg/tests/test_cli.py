import csv
import io
import json
import subprocess
import sys

import pytest

from symlab.cli import main


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_json(capsys):
    code, out, err = run_cli(["analyze", "--coeffs", "0,7,3"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert doc["command"] == "analyze"
    assert doc["symbol"] == {"p": 2, "a": [0.0, 7.0, 3.0]}
    assert doc["lambda"] == [-4.75, -5.0, 5.666666666666666]
    assert doc["x"] == [-2.0, -1.0, 3.0]
    # infinite ray endpoint serializes as null
    ray = doc["cuts"][1]
    assert ray["lo"] is None and ray["hi"] == -5.0


def test_cubic_source_equivalent(capsys):
    code1, out1, _ = run_cli(["analyze", "--coeffs", "0,7,3"], capsys)
    code2, out2, _ = run_cli(["analyze", "--cubic", "-2,-1"], capsys)
    assert code1 == code2 == 0
    assert out1 == out2


def test_zeros_csv(capsys):
    code, out, _ = run_cli(["zeros", "--coeffs", "0,0.25", "--n", "4"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["k", "x"]
    xs = [float(r[1]) for r in rows[1:]]
    assert xs == pytest.approx(
        [-0.8090169943749475, -0.3090169943749474, 0.3090169943749474, 0.8090169943749475]
    )


def test_polys_csv(capsys):
    code, out, _ = run_cli(["polys", "--coeffs", "0,7,3", "--n", "3"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "c0", "c1", "c2", "c3"]
    assert [float(v) for v in rows[4][1:]] == [-3.0, -14.0, 0.0, 1.0]


def test_density_grid(capsys):
    code, out, _ = run_cli(
        ["density", "--coeffs", "0,7,3", "--measure", "rho_1", "--grid", "-4:5:4"],
        capsys,
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x", "density"]
    assert len(rows) == 5
    assert float(rows[1][0]) == -4.0 and float(rows[4][0]) == 5.0
    assert all(float(r[1]) > 0 for r in rows[1:])


def test_density_all_measures(capsys):
    for measure in ("rho_2", "sigma_1", "s_1", "mu_2"):
        grid = "-9:-6:3" if measure == "rho_2" else "-4:5:3"
        code, out, _ = run_cli(
            ["density", "--coeffs", "0,7,3", "--measure", measure, "--grid", grid],
            capsys,
        )
        assert code == 0, measure
        rows = list(csv.reader(io.StringIO(out)))
        assert len(rows) == 4


def test_spectrum_json(capsys):
    code, out, _ = run_cli(
        ["spectrum", "--coeffs", "0,7,3", "--n", "10", "--k", "1"], capsys
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["k"] == 1 and doc["n"] == 10
    assert doc["roots"] == pytest.approx(
        [-42.21537375, -11.6480291, -6.55574882, -5.25703881], abs=1e-6
    )


def test_hp_json(capsys):
    code, out, _ = run_cli(["hp", "--coeffs", "0,0.25", "--n", "4", "--j", "1"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["expected_order"] == -5
    assert doc["slope"] == pytest.approx(-5.0, abs=0.05)


def test_exit_codes(capsys):
    # config errors: malformed coefficients, missing source, both sources
    code, _, err = run_cli(["analyze", "--coeffs", "abc"], capsys)
    assert code == 2
    assert json.loads(err)["error"]["type"] == "ConfigError"

    code, _, err = run_cli(["analyze"], capsys)
    assert code == 2

    code, _, err = run_cli(
        ["analyze", "--coeffs", "0,0.25", "--cubic", "-2,-1"], capsys
    )
    assert code == 2

    # math failure: zero leading coefficient is a domain error, not config
    code, _, err = run_cli(["analyze", "--coeffs", "0,7,0"], capsys)
    assert code == 1
    assert json.loads(err)["error"]["type"] == "ZeroLeadingCoefficient"


def test_out_file(tmp_path, capsys):
    target = tmp_path / "analysis.json"
    code, out, _ = run_cli(
        ["analyze", "--coeffs", "0,7,3", "--out", str(target)], capsys
    )
    assert code == 0
    doc = json.loads(target.read_text())
    assert doc["command"] == "analyze"


def test_deterministic_bytes(capsys):
    _, out1, _ = run_cli(["analyze", "--coeffs", "0,7,3"], capsys)
    _, out2, _ = run_cli(["analyze", "--coeffs", "0,7,3"], capsys)
    assert out1 == out2


def test_verify_fast_subprocess():
    # run end to end through the console entry, including env thread cap
    proc = subprocess.run(
        [sys.executable, "-m", "symlab", "verify", "--coeffs", "0,0.25", "--suite", "fast"],
        capture_output=True,
        text=True,
        env={"PATH": "/usr/bin:/bin", "SYMLAB_THREADS": "1"},
    )
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    assert doc["all_passed"] is True
    names = [c["name"] for c in doc["checks"]]
    assert "widom_l0" in names and "qn_zeros" in names
