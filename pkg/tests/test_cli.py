import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from clockgap.cli import (
    dumps_csv,
    dumps_json,
    figure_data,
    main,
    parse_L_range,
    parse_s_grid,
)

CIRCUITS = Path(__file__).resolve().parent.parent / "circuits"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_ansatz_endpoint(capsys):
    code, out, _ = run(capsys, "spectrum", "--L", "2", "--s", "1", "--method", "ansatz")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema_version"] == 1
    np.testing.assert_allclose(rep["eigenvalues"], [0, 0.5, 1.5], atol=1e-15)


def test_spectrum_s0(capsys):
    code, out, _ = run(capsys, "spectrum", "--L", "2", "--s", "0")
    assert json.loads(out)["eigenvalues"] == [0.0, 1.0, 1.0]


def test_spectrum_methods_agree(capsys):
    got = {}
    for method in ("sturm", "dense", "ansatz"):
        _, out, _ = run(capsys, "spectrum", "--L", "8", "--s", "0.5", "--method", method)
        got[method] = np.array(json.loads(out)["eigenvalues"])
    np.testing.assert_allclose(got["sturm"], got["dense"], atol=1e-10, rtol=0)
    np.testing.assert_allclose(got["sturm"], got["ansatz"], atol=1e-9, rtol=0)


def test_spectrum_vectors_csv(capsys):
    code, out, _ = run(capsys, "spectrum", "--L", "3", "--s", "0.4", "--vectors", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "index,eigenvalue" and len(lines) == 5


@pytest.mark.parametrize(
    "argv",
    [
        ["bounds", "--L", "0"],
        ["spectrum", "--L", "2", "--s", "1.5"],
        ["spectrum", "--L", "2", "--s", "0.5", "--method", "qr"],
        ["scan", "--L", "3", "--s-grid", "0:1:0"],
        ["bounds", "--L", "5..2"],
        ["simulate", "nowhere/missing.json"],
    ],
)
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 2
    err = capsys.readouterr().err
    assert err.startswith("error:") and err.count("\n") == 1


def test_missing_file_message(capsys):
    code, _, err = run(capsys, "simulate", "missing.json")
    assert code == 2 and "file not found" in err


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n_qubits": 1,\n "gates": [\n  {"name": "x" "targets": [0]}]}')
    code, _, err = run(capsys, "simulate", str(bad))
    assert code == 2
    assert "line 3" in err and err.startswith("error:")


def test_invalid_circuit_field(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n_qubits": 1, "gates": [{"name": "x", "targets": [3]}]}))
    code, _, err = run(capsys, "simulate", str(bad))
    assert code == 2 and "gates[0]" in err


def test_bounds_l8(capsys):
    code, out, _ = run(capsys, "bounds", "--L", "8", "--threads", "1")
    assert code == 0
    rep = json.loads(out)["reports"][0]
    c = 1 + math.cos(math.pi / 18)
    assert rep["min_gap_exact"] >= 2 * math.sqrt(2 * c) - 2 * c


def test_bounds_range_csv(capsys):
    code, out, _ = run(capsys, "bounds", "--L", "1..12", "--format", "csv", "--table-points", "3")
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    assert [int(r["L"]) for r in rows] == list(range(1, 13))
    for r in rows:
        assert float(r["bound_closed_form"]) > float(r["deift_bound"]) > float(r["aharonov_bound"])
    closed = [float(r["bound_closed_form"]) for r in rows]
    assert all(b < a for a, b in zip(closed, closed[1:]))


def test_bounds_parallel_matches_serial(capsys):
    _, serial, _ = run(capsys, "bounds", "--L", "1..3", "--threads", "1")
    _, parallel, _ = run(capsys, "bounds", "--L", "1..3", "--threads", "2")
    assert serial == parallel


def test_scan(capsys, tmp_path):
    out_file = tmp_path / "scan.csv"
    code, _, _ = run(capsys, "scan", "--L", "6", "--s-grid", "0:1:11", "--format", "csv",
                     "--out", str(out_file))
    assert code == 0
    rows = list(csv.DictReader(out_file.read_text().splitlines()))
    assert len(rows) == 11
    for r in rows:
        assert float(r["gap"]) >= float(r["gap_lower"]) - 2e-12


def test_figures(capsys, tmp_path):
    code, out, _ = run(capsys, "figures", "--out", str(tmp_path), "--points", "11")
    assert code == 0
    names = {Path(p).name for p in out.split()}
    assert {"fig1_real.csv", "fig1_complex.csv", "fig1_poles.csv", "fig2_eigenvalues.csv",
            "fig2_eigenvectors.csv"} <= names
    poles = list(csv.DictReader((tmp_path / "fig1_poles.csv").read_text().splitlines()))
    assert [float(r["theta_pole"]) for r in poles] == [
        (2 * l - 1) * math.pi / 18 for l in range(1, 9)
    ]
    eig = list(csv.DictReader((tmp_path / "fig2_eigenvalues.csv").read_text().splitlines()))
    for r in eig:
        assert float(r["exact_0"]) <= float(r["approx_0"]) + 1e-12


def test_figure_data_ground_vector_similarity():
    data = figure_data(n_points=3)
    sims = [row[1] for row in data["fig2_similarity.csv"][1]]
    assert sims[0] >= 0.999


def test_simulate_bell(capsys, tmp_path):
    code, out, _ = run(capsys, "simulate", str(CIRCUITS / "bell2.json"), "--T", "100",
                       "--samples", "11")
    assert code == 0
    summary = json.loads(out)
    assert summary["mode"] == "full"
    assert summary["runs"][0]["logical_fidelity"] >= 0.999


def test_simulate_sudden_limit_writes_files(capsys, tmp_path):
    code, _, _ = run(capsys, "simulate", str(CIRCUITS / "bell2.json"), "--T", "0.01",
                     "--T", "0.02", "--samples", "3", "--out", str(tmp_path))
    assert code == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert len(summary["runs"]) == 2
    assert summary["runs"][0]["p_clock_L"] <= 0.01
    traces = sorted(p.name for p in tmp_path.glob("trace_*.csv"))
    assert len(traces) == 2
    header = (tmp_path / traces[0]).read_text().splitlines()[0]
    assert header == "t,s,overlap,leakage,norm"


def test_deterministic_output(capsys):
    argv = ["scan", "--L", "5", "--s-grid", "0:1:7", "--format", "csv"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    _, j1, _ = run(capsys, "bounds", "--L", "3")
    _, j2, _ = run(capsys, "bounds", "--L", "3")
    assert j1 == j2


def test_float_formatting_round_trips():
    vals = [0.1, 1 / 3, math.pi, 1e-300, 2.0**-1074]
    text = dumps_csv(["x"], [[v] for v in vals])
    assert [float(x) for x in text.splitlines()[1:]] == vals
    assert json.loads(dumps_json({"x": math.nan}))["x"] is None


def test_parsers():
    assert parse_L_range("4") == [4]
    assert parse_L_range("1..3") == [1, 2, 3]
    np.testing.assert_allclose(parse_s_grid("0:1:5"), [0, 0.25, 0.5, 0.75, 1])


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "clockgap", "spectrum", "--L", "1", "--s", "1"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["eigenvalues"][0] == pytest.approx(0, abs=1e-12)
