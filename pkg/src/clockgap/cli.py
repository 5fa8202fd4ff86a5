"""Command-line front end.

    clockgap spectrum --L 8 --s 0.5 --method sturm
    clockgap scan --L 8 --s-grid 0:1:101 --format csv --out scan.csv
    clockgap bounds --L 1..32 --format csv
    clockgap figures --out figdata/
    clockgap simulate circuits/bell2.json --T 450 --out sim/

Exit codes: 0 success, 1 invariant violation, 2 usage or I/O error.  Every
failure prints one line starting with ``error:`` on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import adiabatic, ansatz, bounds, tridiag
from .circuit import CircuitError, circuit_from_dict
from .clock import DENSE_MAX_DIM, full_dim

SCHEMA_VERSION = 1
METHODS = ("sturm", "dense", "ansatz")


class UsageError(Exception):
    pass


class InvariantError(Exception):
    pass


# --------------------------------------------------------------------------
# serialisation


def _clean(x):
    """JSON-safe values: numpy scalars to Python, NaN/inf to None."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    return x


def dumps_json(obj) -> str:
    payload = {"schema_version": SCHEMA_VERSION, **_clean(obj)}
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))  # shortest round-trip
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def dumps_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror}") from None


def _write(directory: Path, name: str, text: str) -> str:
    path = directory / name
    try:
        path.write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None
    return str(path)


# --------------------------------------------------------------------------
# argument parsing helpers


def parse_L_range(text: str) -> list[int]:
    """``"8"`` -> [8]; ``"1..32"`` -> [1, ..., 32]."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"--L expects an integer or a range a..b, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise UsageError(f"--L must satisfy 1 <= a <= b, got {text!r}")
    return list(range(lo, hi + 1))


def parse_s_grid(text: str) -> np.ndarray:
    """``"a:b:n"`` -> ``n`` evenly spaced points from ``a`` to ``b``."""
    parts = text.split(":")
    try:
        if len(parts) != 3:
            raise ValueError
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"--s-grid expects a:b:n, got {text!r}") from None
    if n < 1:
        raise UsageError("--s-grid needs at least one point")
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        raise UsageError(f"--s-grid endpoints must lie in [0, 1], got {text!r}")
    return np.linspace(a, b, n)


def _check_s(s: float):
    if not 0.0 <= s <= 1.0:
        raise UsageError(f"--s must lie in [0, 1], got {s}")


def _check_L(L: int):
    if L < 1:
        raise UsageError(f"--L must be >= 1, got {L}")


# --------------------------------------------------------------------------
# commands


def cmd_spectrum(L: int, s: float, method: str = "sturm", vectors: bool = False) -> dict:
    """Eigenvalues (and optionally unit eigenvectors) of the reduced Hamiltonian."""
    _check_L(L)
    _check_s(s)
    h = tridiag.reduced_hamiltonian(L, s)
    if method == "sturm":
        spec = tridiag.eigs_bisect(h, want_vectors=vectors)
        values, vecs = spec.eigenvalues, spec.eigenvectors
    elif method == "dense":
        spec = tridiag.eigs_dense_oracle(h, want_vectors=vectors)
        values, vecs = spec.eigenvalues, spec.eigenvectors
    elif method == "ansatz":
        a = ansatz.full_ansatz_spectrum(s, L)
        values = a.eigenvalues
        vecs = a.eigenvectors / np.linalg.norm(a.eigenvectors, axis=0) if vectors else None
    else:
        raise UsageError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    report = {"L": L, "s": s, "method": method, "eigenvalues": values}
    if vectors:
        report["eigenvectors"] = vecs.T  # one row per eigenvalue
    return report


def cmd_scan(L: int, s_values) -> list[list]:
    """Per-s rows: exact lowest pair, gap, both bounds, the lower gap curve."""
    _check_L(L)
    rows = []
    for r in bounds.gap_table(L, s_values):
        rows.append(
            [r.s, r.lambda0, r.lambda1, r.gap, r.lambda0_upper, r.lambda1_lower,
             bounds.gap_lower_curve(r.s, L)]
        )
    return rows


SCAN_HEADER = ["s", "lambda0", "lambda1", "gap", "lambda0_upper", "lambda1_lower", "gap_lower"]


def _report_for(args):
    L, table_points = args
    return bounds.compare_prior_bounds(L, table_points=table_points)


def cmd_bounds(Ls, table_points: int = 11, threads: int = 1) -> list[bounds.GapReport]:
    for L in Ls:
        _check_L(L)
    jobs = [(L, table_points) for L in Ls]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_report_for, jobs))
    return [_report_for(j) for j in jobs]


BOUNDS_HEADER = [
    "L", "epsilon", "min_gap_exact", "s_star", "bound_closed_form", "bound_leading_order",
    "aharonov_bound", "deift_bound", "ratio_to_aharonov", "ratio_to_deift",
]


def _bounds_row(r: bounds.GapReport):
    return [r.L, r.epsilon, r.min_gap_exact, r.s_star, r.bound_closed_form,
            r.bound_leading_order, r.aharonov_bound, r.deift_bound,
            r.ratio_to_aharonov, r.ratio_to_deift]


def figure_data(L: int = 8, n_points: int = 101, vec_L: int = 32, vec_s: float = 0.8,
                n_vectors: int = 4) -> dict[str, tuple[list, list]]:
    """Tables for the branch-function plot and the exact-vs-approximate comparison.

    Returns ``{file name: (header, rows)}``.
    """
    out = {}

    theta = np.linspace(1e-3, 3.0, 600)
    out["fig1_real.csv"] = (["theta", "f_real"], [[t, ansatz.f_real(float(t), L)] for t in theta])

    poles = [ansatz.pole(L, l) for l in range(1, L + 1)]
    rows = []
    for t in np.linspace(0.0, math.pi, 2001)[1:-1]:
        t = float(t)
        if min(abs(t - p) for p in poles) < 1e-6:
            continue
        rows.append([t, ansatz.f_complex(t, L)])
    out["fig1_complex.csv"] = (["theta", "f_complex"], rows)
    out["fig1_poles.csv"] = (["l", "theta_pole"], [[l, p] for l, p in enumerate(poles, start=1)])

    rows = []
    for s in np.linspace(0.0, 1.0, 11):
        s = float(s)
        for l in range(1, L + 1):
            rows.append([s, l, ansatz.solve_complex_branch(s, L, l).theta,
                         ansatz.theta_l_approx(s, L, l)])
    out["fig1_roots.csv"] = (["s", "l", "theta_exact", "theta_approx"], rows)

    header = ["s"] + [f"exact_{j}" for j in range(L + 1)] + [f"approx_{j}" for j in range(L + 1)]
    rows = []
    for s in np.linspace(0.0, 1.0, n_points):
        s = float(s)
        exact = tridiag.eigs_bisect(tridiag.reduced_hamiltonian(L, s)).eigenvalues
        rows.append([s, *exact, *ansatz.approx_spectrum(s, L)])
    out["fig2_eigenvalues.csv"] = (header, rows)

    exact = tridiag.eigs_bisect(
        tridiag.reduced_hamiltonian(vec_L, vec_s), want_vectors=True
    ).eigenvectors[:, :n_vectors]
    approx = ansatz.approx_eigenvectors(vec_s, vec_L, n_vectors)
    approx = approx / np.linalg.norm(approx, axis=0)
    signs = np.sign(np.sum(approx * exact, axis=0))
    signs[signs == 0] = 1.0
    approx = approx * signs
    header = ["k"] + [f"exact_{j}" for j in range(n_vectors)] + [
        f"approx_{j}" for j in range(n_vectors)
    ]
    rows = [[k, *exact[k], *approx[k]] for k in range(vec_L + 1)]
    out["fig2_eigenvectors.csv"] = (header, rows)

    sims = np.sum(approx * exact, axis=0)
    out["fig2_similarity.csv"] = (
        ["level", "cosine_similarity"], [[j, float(v)] for j, v in enumerate(sims)]
    )
    return out


def cmd_figures(out_dir: str, L: int = 8, n_points: int = 101) -> list[str]:
    _check_L(L)
    directory = Path(out_dir)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {directory}: {exc.strerror}") from None
    written = []
    for name, (header, rows) in figure_data(L, n_points).items():
        written.append(_write(directory, name, dumps_csv(header, rows)))
    return written


def load_circuit(path: str):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"file not found: {path}")
    try:
        text = p.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(
            f"malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    try:
        return circuit_from_dict(data)
    except CircuitError as exc:
        raise UsageError(f"invalid circuit in {path}: {exc}") from None


def cmd_simulate(circuit_path: str, T_list=None, samples: int = 201) -> dict:
    """Run the adiabatic evolution for each ``T``; full space when it fits."""
    circuit = load_circuit(circuit_path)
    L = circuit.n_gates
    if not T_list:
        T_list = [adiabatic.adiabatic_time(L)]
    dim = full_dim(circuit)
    mode = "full" if dim <= DENSE_MAX_DIM else "reduced"
    runs = []
    for T in T_list:
        if not T > 0:
            raise UsageError(f"--T must be positive, got {T}")
        schedule = adiabatic.Schedule(float(T))
        if mode == "full":
            trace = adiabatic.evolve_full(circuit, schedule, samples)
        else:
            trace = adiabatic.evolve_reduced(L, schedule, samples)
        runs.append({"T": float(T), "steps": schedule.steps, "trace": trace})
    return {"n_qubits": circuit.n_qubits, "L": L, "dim": dim, "mode": mode, "runs": runs}


TRACE_HEADER = ["t", "s", "overlap", "leakage", "norm"]


# --------------------------------------------------------------------------
# main


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clockgap", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, fmt=True):
        if fmt:
            p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="output path ('-' or omitted: stdout)")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("spectrum", help="eigenvalues of the reduced Hamiltonian")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--method", choices=METHODS, default="sturm")
    p.add_argument("--vectors", action="store_true")
    common(p)

    p = sub.add_parser("scan", help="exact gap and bounds over an s grid")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--s-grid", default="0:1:101")
    common(p)

    p = sub.add_parser("bounds", help="gap reports for one L or a range a..b")
    p.add_argument("--L", required=True)
    p.add_argument("--table-points", type=int, default=11)
    common(p)

    p = sub.add_parser("figures", help="CSV data behind the branch and comparison plots")
    p.add_argument("--L", type=int, default=8)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--out", default="figures")

    p = sub.add_parser("simulate", help="adiabatic evolution of a circuit file")
    p.add_argument("circuit")
    p.add_argument("--T", type=float, action="append", default=None)
    p.add_argument("--samples", type=int, default=201)
    common(p)
    return parser


def _run(args) -> int:
    if args.command == "spectrum":
        rep = cmd_spectrum(args.L, args.s, args.method, args.vectors)
        if args.format == "json":
            _emit(dumps_json(rep), args.out)
        else:
            rows = [[j, v] for j, v in enumerate(rep["eigenvalues"])]
            _emit(dumps_csv(["index", "eigenvalue"], rows), args.out)
        return 0

    if args.command == "scan":
        rows = cmd_scan(args.L, parse_s_grid(args.s_grid))
        if args.format == "json":
            _emit(dumps_json({"L": args.L, "rows": [dict(zip(SCAN_HEADER, r)) for r in rows]}),
                  args.out)
        else:
            _emit(dumps_csv(SCAN_HEADER, rows), args.out)
        bad = [r for r in rows if r[3] < r[6] - bounds.BOUND_SLACK]
        if bad:
            raise InvariantError(f"gap below lower curve at L={args.L}, s={bad[0][0]!r}")
        return 0

    if args.command == "bounds":
        reports = cmd_bounds(parse_L_range(args.L), args.table_points, args.threads)
        if args.format == "json":
            _emit(dumps_json({"reports": [r.to_dict() for r in reports]}), args.out)
        else:
            _emit(dumps_csv(BOUNDS_HEADER, [_bounds_row(r) for r in reports]), args.out)
        problems = [v for r in reports for v in r.violations()]
        if problems:
            raise InvariantError(problems[0])
        return 0

    if args.command == "figures":
        for path in cmd_figures(args.out, args.L, args.points):
            sys.stdout.write(path + "\n")
        return 0

    if args.command == "simulate":
        result = cmd_simulate(args.circuit, args.T, args.samples)
        summary = {k: v for k, v in result.items() if k != "runs"}
        summary["runs"] = [
            {"T": r["T"], "steps": r["steps"], **r["trace"].summary()} for r in result["runs"]
        ]
        if args.out is None or args.out == "-":
            if args.format == "csv":
                keys = ["T", "steps", "final_overlap", "max_leakage", "max_norm_drift",
                        "p_clock_L", "p_clock_L_alt", "logical_fidelity"]
                _emit(dumps_csv(keys, [[run[k] for k in keys] for run in summary["runs"]]), None)
            else:
                _emit(dumps_json(summary), None)
            return 0
        directory = Path(args.out)
        try:
            directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise UsageError(f"cannot create {directory}: {exc.strerror}") from None
        for r in result["runs"]:
            _write(directory, f"trace_T{r['T']!r}.csv", dumps_csv(TRACE_HEADER, r["trace"].rows()))
        _write(directory, "summary.json", dumps_json(summary))
        sys.stdout.write(str(directory / "summary.json") + "\n")
        return 0

    raise UsageError(f"unknown command {args.command!r}")  # pragma: no cover


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except InvariantError as exc:
        sys.stderr.write(f"error: invariant violated: {exc}\n")
        return 1
    except (ValueError, adiabatic.StepSizeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
