import csv
import io
import json
import math

import numpy as np
import pytest

from sadslab.cli import parse_range, run


def _csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_parse_range():
    np.testing.assert_allclose(parse_range("3:12:0.25"), 3 + 0.25 * np.arange(37))
    assert len(parse_range("0:1:0.3")) == 4
    for bad in ("3:12", "a:b:c", "3:1:0.5", "0:1:0", "0:1:-1"):
        with pytest.raises(ValueError):
            parse_range(bad)


def test_analyze_sads_hawking_column(tmp_path):
    out = tmp_path / "spheres.csv"
    assert run(["analyze", "--metric", "sads", "--mass", "1", "--r", "3:12:0.25", "--out", str(out)]) == 0
    rows = _csv(out)
    assert list(rows[0].keys()) == [
        "r", "s", "area", "H", "K", "hawking", "cy_slack", "gauss_residual", "deltar_residual", "lambda1",
    ]
    assert len(rows) == 37
    assert max(abs(float(r["hawking"]) - 1) for r in rows) < 1e-9
    # 17 significant digits
    assert len(rows[0]["r"].split("e")[0].replace(".", "").lstrip("-")) == 17


def test_analyze_deterministic_and_parallel(tmp_path, monkeypatch):
    args = ["analyze", "--metric", "perturbed", "--mass", "1", "--perturb", "0.2:5", "--r", "2:8:0.5"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args + ["--out", str(a)]) == 0
    monkeypatch.setenv("SADSLAB_WORKERS", "4")
    assert run(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_bad_worker_count(tmp_path, monkeypatch):
    monkeypatch.setenv("SADSLAB_WORKERS", "zero")
    assert run(["analyze", "--mass", "1", "--r", "3:4:0.5", "--out", str(tmp_path / "x.csv")]) == 2


def test_json_round_trip(tmp_path):
    first = tmp_path / "first.json"
    assert run(["analyze", "--metric", "sads", "--mass", "2", "--r", "4:9:1", "--format", "json", "--out", str(first)]) == 0
    second = tmp_path / "second.json"
    assert run(["analyze", "--spec", str(first), "--r", "4:9:1", "--format", "json", "--out", str(second)]) == 0
    a, b = json.loads(first.read_text()), json.loads(second.read_text())
    assert a["metric"] == b["metric"]
    np.testing.assert_allclose(np.array(a["rows"]), np.array(b["rows"]), rtol=1e-12, atol=0)


def test_json_round_trip_glued(tmp_path):
    first = tmp_path / "g.json"
    assert run(["profile", "--metric", "glued", "--mass", "1", "--r", "4:9:0.5", "--format", "json", "--out", str(first)]) == 0
    second = tmp_path / "g2.json"
    assert run(["profile", "--spec", str(first), "--r", "4:9:0.5", "--format", "json", "--out", str(second)]) == 0
    assert json.loads(first.read_text())["rows"] == json.loads(second.read_text())["rows"]


def test_profile_hyperbolic_fit(tmp_path, capsys):
    out = tmp_path / "p.json"
    assert run(["profile", "--metric", "hyperbolic", "--fit", "isoballs", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["constant_term"] == pytest.approx(math.pi * (1 + math.log(math.pi)), abs=1e-3)
    assert doc["columns"] == ["r", "A", "V", "H", "dVdA", "second_law", "mono23"]
    assert "constant term" in capsys.readouterr().err


def test_profile_csv_columns(tmp_path):
    out = tmp_path / "p.csv"
    assert run(["profile", "--mass", "1", "--r", "3:8:0.25", "--out", str(out)]) == 0
    rows = _csv(out)
    assert rows[0]["second_law"] == "nan"
    mid = rows[10]
    assert float(mid["dVdA"]) * float(mid["H"]) == pytest.approx(1.0, rel=1e-6)


def test_foliation_and_spectrum(tmp_path):
    out = tmp_path / "f.csv"
    assert run(["foliation", "--mass", "1", "--r", "3:6:0.25", "--out", str(out)]) == 0
    assert all(abs(float(r["F"]) - 1) < 1e-9 for r in _csv(out))
    out = tmp_path / "s.csv"
    assert run(["spectrum", "--mass", "1", "--r", "8:10:1", "--lmax", "3", "--out", str(out)]) == 0
    rows = _csv(out)
    assert list(rows[0].keys()) == ["r", "lambda0", "lambda1", "lambda2", "lambda3"]
    assert float(rows[0]["lambda1"]) * math.exp(24) / 48 == pytest.approx(1.0, rel=0.05)


def test_conformal_check(capsys):
    assert run(["conformal-check", "--seed", "42", "--trials", "10", "--lmax", "8", "--grid", "64x128"]) == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("max |S(u)-S(v)|")
    assert float(line.split("=")[1].split()[0]) < 1e-6


def test_conformal_check_output_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(["conformal-check", "--seed", "7", "--trials", "3", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    assert run(["conformal-check", "--seed", "8", "--trials", "3", "--out", str(c)]) == 0
    assert a.read_bytes() != c.read_bytes()


def test_counterexample_command(tmp_path):
    out = tmp_path / "c.json"
    assert run(["counterexample", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["counterexample"]["drift_star"] < 0
    assert doc["counterexample"]["min_scalar_R"] < -6
    assert doc["counterexample"]["verdict"].startswith("centered spheres are beaten")
    assert doc["control"]["drift_star"] > 0
    assert doc["control"]["verdict"] == "centered spheres survive the (*) test"


def test_exit_codes(tmp_path, capsys):
    assert run(["bogus"]) == 2
    assert run([]) == 2
    assert run(["analyze", "--spec", str(tmp_path / "nope.json")]) == 2
    assert run(["analyze", "--metric", "sads"]) == 2
    assert run(["analyze", "--mass", "-1"]) == 2
    assert run(["analyze", "--mass", "1", "--r", "0:2:0.5"]) == 2
    assert run(["spectrum", "--mass", "1", "--lmax", "0"]) == 2
    assert run(["conformal-check", "--grid", "banana"]) == 2
    assert run(["profile", "--metric", "hyperbolic", "--r", "0:3:0.25"]) == 2


def test_convergence_exit_code(tmp_path, monkeypatch):
    from sadslab import profile
    from sadslab.errors import ConvergenceError

    def boom(*args, **kwargs):
        raise ConvergenceError("forced")

    monkeypatch.setattr(profile, "isoballs_constant_fit", boom)
    assert run(["profile", "--metric", "hyperbolic", "--fit", "isoballs", "--out", str(tmp_path / "x.csv")]) == 3


def test_accept_command(monkeypatch, capsys):
    from sadslab import acceptance

    monkeypatch.setattr(acceptance, "CRITERIA", (acceptance.disk_plane_identity,))
    assert run(["accept"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] 10." in out and "1/1 criteria passed" in out
    monkeypatch.setattr(acceptance, "CRITERIA", (acceptance.sixteen_pi_law,))
    assert run(["accept"]) == 1
