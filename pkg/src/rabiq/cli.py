"""Command-line front end: free energies, gap scans, figure datasets,
closed-form table evaluation, and the trapped-ion estimate.

Every data file is CSV (UTF-8, comma-separated, LF endings, values in
12-significant-digit scientific notation) with a JSON manifest sidecar.
Re-running a command with identical flags reproduces the CSV byte for
byte; manifests differ only in timestamp / wall-time fields.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    ScanRow,
    ScanTable,
    coeff_closed,
    critical_scan,
    delta_qc,
    experiment_estimate,
    fit_at,
    fit_basis,
    log_grid,
    scan,
)
from .errors import ConvergenceError
from .model import ModelKind, Phase, classify_phase, from_dimensionless
from .thermo_classical import fc_closed, fc_numeric
from .thermo_quantum import fq_closed, fq_numeric

SCAN_HEADER = "x,q,eta,beta,F_Q,F_C,delta_qc,err,method_q,method_c"
FIT_HEADER = "model,eta,beta,q,A,B,residual_rms,A_closed,B_closed"
TABLE1_HEADER = "cell,phase,x,q,beta,closed,numeric,diff"

_MODEL_ETA = {"jc": 1.0, "ajc": 0.0, "rabi": 0.5}


def _fmt(v: float) -> str:
    return f"{v:.11e}"


def _write_csv(path: Path, header: str, rows: list[list]) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(_fmt(c) if isinstance(c, float) else str(c) for c in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


@dataclass(frozen=True)
class RunManifest:
    """Sidecar metadata: every emitted data file gets exactly one."""

    command: str
    argv: list[str]
    parameters: dict
    eps: float
    threads: int
    version: str
    created_utc: str
    wall_time_s: float
    data_file: str
    method_tags: dict = field(default_factory=dict)


def _write_manifest(csv_path: Path, command: str, params: dict, eps: float,
                    threads: int, wall: float, tags: dict, extra: dict | None = None) -> None:
    manifest = asdict(RunManifest(
        command=command,
        argv=sys.argv[1:],
        parameters=params,
        eps=eps,
        threads=threads,
        version=__version__,
        created_utc=datetime.now(timezone.utc).isoformat(),
        wall_time_s=wall,
        data_file=csv_path.name,
        method_tags=tags,
    ))
    if extra:
        manifest.update(extra)
    csv_path.with_suffix(csv_path.suffix + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _scan_rows(table: ScanTable) -> list[list]:
    return [[r.x, r.q, r.eta, r.beta, r.f_q, r.f_c, r.delta_qc, r.err,
             r.method_q, r.method_c] for r in table.rows]


def _tag_counts(table: ScanTable) -> dict:
    tags: dict[str, int] = {}
    for r in table.rows:
        for t in (r.method_q, r.method_c):
            tags[t] = tags.get(t, 0) + 1
    return tags


def _emit_scan(args, table: ScanTable, name: str, command: str, params: dict,
               wall: float, plotter=None, extra: dict | None = None) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{name}.csv"
    _write_csv(csv_path, SCAN_HEADER, _scan_rows(table))
    _write_manifest(csv_path, command, params, args.eps, args.threads, wall,
                    _tag_counts(table), extra)
    print(f"wrote {csv_path}")
    if plotter is not None and not args.no_plot:
        png = out / f"{name}.png"
        plotter(table.rows, str(png))
        print(f"wrote {png}")
    if not table.converged:
        print("warning: some rows failed to converge", file=sys.stderr)
        return 3
    return 0


def _grid_arg(text: str, log: bool) -> list[float]:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("grid must be 'lo:hi:n'") from exc
    if n < 2 or hi <= lo:
        raise argparse.ArgumentTypeError("grid needs hi > lo and n >= 2")
    return log_grid(lo, hi, n) if log else list(np.linspace(lo, hi, n))


def _resolve_eta(args) -> float:
    if args.model == "generalized":
        if args.eta is None:
            raise SystemExit2("--model generalized requires --eta")
        return args.eta
    if args.eta is not None and args.eta != _MODEL_ETA[args.model]:
        raise SystemExit2(f"--eta conflicts with --model {args.model}")
    return _MODEL_ETA[args.model]


class SystemExit2(SystemExit):
    def __init__(self, message: str):
        print(f"error: {message}", file=sys.stderr)
        super().__init__(2)


def cmd_free_energy(args) -> int:
    eta = _resolve_eta(args)
    params = from_dimensionless(args.x, args.q, eta, gc=args.gc,
                                beta=args.beta, hbar=args.hbar)
    if args.method == "numeric":
        fe = (fq_numeric(params, args.beta, args.eps) if args.treatment == "quantum"
              else fc_numeric(params, args.beta, args.eps))
    else:
        if eta not in (0.0, 1.0):
            raise SystemExit2("closed-form cells exist for jc/ajc only")
        phase = classify_phase(args.q)
        kind = ModelKind.JC if eta == 1.0 else ModelKind.AJC
        if args.treatment == "quantum":
            fe = fq_closed(kind, phase, args.x, args.q, args.beta, args.gc, args.hbar)
        else:
            fe = fc_closed(phase, args.x, args.q, args.beta, args.gc, args.hbar)
    print(f"F_{args.treatment[0].upper()} = {_fmt(fe.value)}  "
          f"err <= {_fmt(fe.err_estimate)}  [{fe.method.value}]")
    return 0


def cmd_quantumness(args) -> int:
    eta = _resolve_eta(args)
    params = from_dimensionless(args.x, args.q, eta, gc=args.gc,
                                beta=args.beta, hbar=args.hbar)
    r = delta_qc(params, args.beta, method=args.method, eps=args.eps)
    print(f"delta_qc = {_fmt(r.value)}  err <= {_fmt(r.err)}  "
          f"(F_Q = {_fmt(r.f_q)}, F_C = {_fmt(r.f_c)})")
    return 0


def cmd_scan(args) -> int:
    eta = _resolve_eta(args)
    if (args.x_grid is None) == (args.q_grid is None):
        raise SystemExit2("provide exactly one of --x-grid / --q-grid")
    t0 = time.perf_counter()
    if args.x_grid is not None:
        if args.q is None:
            raise SystemExit2("--x-grid requires a fixed --q")
        points = [(x, args.q, eta) for x in args.x_grid]
    else:
        if args.x is None:
            raise SystemExit2("--q-grid requires a fixed --x")
        points = [(args.x, q, eta) for q in args.q_grid]
    table = scan(points, args.beta, eps=args.eps, gc=args.gc,
                 hbar=args.hbar, threads=args.threads)
    params = {"model": args.model, "eta": eta, "beta": args.beta, "gc": args.gc,
              "hbar": args.hbar, "q": args.q, "x": args.x}
    from .plotting import plot_q_scan, plot_x_scan
    plotter = plot_x_scan if args.x_grid is not None else plot_q_scan
    return _emit_scan(args, table, "scan", "scan", params,
                      time.perf_counter() - t0, plotter)


def cmd_fit(args) -> int:
    path = Path(args.input)
    rows = _read_scan_csv(path)
    groups: dict[tuple, list[ScanRow]] = {}
    for r in rows:
        groups.setdefault((r.q, r.eta, r.beta), []).append(r)
    blocks = []
    for (q, eta, beta), grp in sorted(groups.items()):
        grp = sorted(grp, key=lambda r: r.x)
        xs = np.array([r.x for r in grp])
        a, b, rms = fit_basis(xs, np.array([r.delta_qc for r in grp]))
        blocks.append({"q": q, "eta": eta, "beta": beta, "A": a, "B": b,
                       "residual_rms": rms, "n_points": len(grp)})
        print(f"q={q:g} eta={eta:g} beta={beta:g}: "
              f"A={_fmt(a)} B={_fmt(b)} residual_rms={_fmt(rms)}")
    manifest_path = path.with_suffix(path.suffix + ".manifest.json")
    manifest = {}
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    manifest.setdefault("fits", []).extend(blocks)
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
    print(f"appended fit block to {manifest_path}")
    return 0


def _read_scan_csv(path: Path) -> list[ScanRow]:
    lines = path.read_text(encoding="utf-8").strip().split("\n")
    if lines[0] != SCAN_HEADER:
        raise SystemExit2(f"{path} does not carry the scan schema")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        rows.append(ScanRow(*(float(v) for v in parts[:8]), parts[8], parts[9]))
    return rows


# Figure defaults follow the source figure captions; panel ids are keys.
_FIG2 = {
    "2a": dict(eta=1.0, qs=(0.3, 0.7, 1.5), beta=2.0, grid=(1e2, 1e4, 16)),
    "2b": dict(eta=0.0, qs=(0.3, 0.7, 1.5), beta=2.0, grid=(1e2, 1e4, 16)),
    "2c": dict(eta=0.5, qs=(0.6,), beta=5.0, grid=(25.0, 400.0, 8)),
    "2d": dict(eta=0.5, qs=(1.2,), beta=5.0, grid=(25.0, 400.0, 8)),
}
_FIG3_QGRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9,
               1.05, 1.1, 1.2, 1.3, 1.4, 1.5)
_FIG3 = {
    "3a": dict(model="jc", coef="A"), "3b": dict(model="jc", coef="B"),
    "3c": dict(model="ajc", coef="A"), "3d": dict(model="ajc", coef="B"),
    "3e": dict(model="generalized", coef="A"), "3f": dict(model="generalized", coef="B"),
}
_FIG4 = {"4a": 1.0, "4b": 0.5, "4c": 0.25, "4d": 0.0}


def _figure_fit_rows(args, model: str) -> list[dict]:
    rows = []
    if model in ("jc", "ajc"):
        eta = _MODEL_ETA[model]
        kind = ModelKind.JC if model == "jc" else ModelKind.AJC
        for beta in (20.0, 80.0):
            for q in _FIG3_QGRID:
                fit = fit_at(q, eta, beta, eps=args.eps, threads=args.threads)
                a_c, b_c = coeff_closed(kind, q, beta)
                rows.append({"model": model, "eta": eta, "beta": beta, "q": q,
                             "A": fit.A, "B": fit.B, "residual_rms": fit.residual_rms,
                             "A_closed": a_c, "B_closed": b_c})
    else:
        # mixing scan at fixed couplings on either side of the transition
        for q in (0.6, 1.2):
            for eta in (0.0, 0.25, 0.5, 0.75, 1.0):
                fit = fit_at(q, eta, 20.0, eps=args.eps, threads=args.threads)
                rows.append({"model": model, "eta": eta, "beta": 20.0, "q": q,
                             "A": fit.A, "B": fit.B, "residual_rms": fit.residual_rms,
                             "A_closed": None, "B_closed": None})
    return rows


def cmd_figure(args) -> int:
    from .plotting import plot_coefficients, plot_experiment, plot_q_scan, plot_x_scan

    fid = args.id
    t0 = time.perf_counter()
    if fid in _FIG2:
        cfg = _FIG2[fid]
        lo, hi, n = cfg["grid"]
        points = [(x, q, cfg["eta"]) for q in cfg["qs"] for x in log_grid(lo, hi, n)]
        table = scan(points, cfg["beta"], eps=args.eps, threads=args.threads)
        return _emit_scan(args, table, f"figure_{fid}", f"figure --id {fid}", cfg,
                          time.perf_counter() - t0, plot_x_scan)
    if fid in _FIG3:
        cfg = _FIG3[fid]
        rows = _figure_fit_rows(args, cfg["model"])
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / f"figure_{fid}.csv"
        data = [[r["model"], r["eta"], r["beta"], r["q"], r["A"], r["B"],
                 r["residual_rms"],
                 r["A_closed"] if r["A_closed"] is not None else "",
                 r["B_closed"] if r["B_closed"] is not None else ""] for r in rows]
        _write_csv(csv_path, FIT_HEADER, data)
        _write_manifest(csv_path, f"figure --id {fid}", cfg, args.eps, args.threads,
                        time.perf_counter() - t0, {"fit": len(rows)})
        print(f"wrote {csv_path}")
        if not args.no_plot:
            png = out / f"figure_{fid}.png"
            against = "q" if cfg["model"] in ("jc", "ajc") else "eta"
            plot_coefficients(rows, str(png), cfg["coef"], against)
            print(f"wrote {png}")
        return 0
    if fid in _FIG4:
        eta = _FIG4[fid]
        g_grid = [round(0.2 + 0.1 * i, 10) for i in range(13)]
        table = critical_scan(eta, 5.0, 25.0, g_grid, eps=args.eps,
                              threads=args.threads)
        params = {"eta": eta, "beta": 5.0, "x": 25.0, "g_grid": g_grid}
        return _emit_scan(args, table, f"figure_{fid}", f"figure --id {fid}",
                          params, time.perf_counter() - t0, plot_q_scan)
    if fid == "5":
        table, params = _experiment_table(4.0, 100.0, 20.0, 5.0, 1.4, 15, True,
                                          args.eps, args.threads)
        name = "figure_5"
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / f"{name}.csv"
        _write_experiment_csv(csv_path, table)
        _write_manifest(csv_path, "figure --id 5", params, args.eps, args.threads,
                        time.perf_counter() - t0, _tag_counts(table))
        print(f"wrote {csv_path}")
        if not args.no_plot:
            png = out / f"{name}.png"
            plot_experiment(table.rows, str(png))
            print(f"wrote {png}")
        return 0 if table.converged else 3
    raise SystemExit2(f"unknown figure id {fid!r}")


def cmd_table1(args) -> int:
    t0 = time.perf_counter()
    rows = []
    qs = args.q if args.q else [0.5, 1.2]
    for q in qs:
        phase = classify_phase(q)
        if phase is Phase.CRITICAL:
            raise SystemExit2("closed-form cells do not exist at q = 1")
        pname = "n" if phase is Phase.NORMAL else "sr"
        fc_num = None
        for model, kind in (("jc", ModelKind.JC), ("ajc", ModelKind.AJC)):
            params = from_dimensionless(args.x, q, _MODEL_ETA[model],
                                        gc=args.gc, beta=args.beta, hbar=args.hbar)
            closed = fq_closed(kind, phase, args.x, q, args.beta, args.gc, args.hbar)
            numeric = fq_numeric(params, args.beta, args.eps)
            rows.append([f"{model}_quantum", pname, args.x, q, args.beta,
                         closed.value, numeric.value, numeric.value - closed.value])
            if fc_num is None:
                fc_num = fc_numeric(params, args.beta, args.eps)
        c_closed = fc_closed(phase, args.x, q, args.beta, args.gc, args.hbar)
        rows.append(["classical", pname, args.x, q, args.beta,
                     c_closed.value, fc_num.value, fc_num.value - c_closed.value])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "table1.csv"
    _write_csv(csv_path, TABLE1_HEADER, rows)
    _write_manifest(csv_path, "table1", {"x": args.x, "q": qs, "beta": args.beta},
                    args.eps, args.threads, time.perf_counter() - t0,
                    {"rows": len(rows)})
    print(f"wrote {csv_path}")
    return 0


EXPERIMENT_HEADER = SCAN_HEADER + ",ratio"


def _write_experiment_csv(path: Path, table: ScanTable) -> None:
    rows = [[r.x, r.q, r.eta, r.beta, r.f_q, r.f_c, r.delta_qc, r.err,
             r.method_q, r.method_c, r.ratio] for r in table.rows]
    _write_csv(path, EXPERIMENT_HEADER, rows)


def _experiment_table(omega_khz: float, Omega_khz: float, gc_khz: float,
                      beta_hbar_gc: float, g_max: float, points: int,
                      two_pi: bool, eps: float, threads: int):
    factor = 2.0 * math.pi if two_pi else 1.0
    omega, Omega, gc = factor * omega_khz, factor * Omega_khz, factor * gc_khz
    beta = beta_hbar_gc / gc
    g_grid = list(np.linspace(0.0, g_max * gc, points))
    table = experiment_estimate(omega, Omega, gc, beta, g_grid,
                                eps=eps, threads=threads)
    params = {"omega": omega, "Omega": Omega, "gc": gc, "beta": beta,
              "beta_hbar_gc": beta_hbar_gc, "g_max": g_max,
              "points": points, "two_pi": two_pi, "units": "angular kHz"}
    return table, params


def cmd_experiment(args) -> int:
    from .plotting import plot_experiment

    t0 = time.perf_counter()
    table, params = _experiment_table(
        args.omega_khz, args.capital_omega_khz, args.gc_khz, args.beta_hbar_gc,
        args.g_max, args.points, args.two_pi, args.eps, args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "experiment.csv"
    _write_experiment_csv(csv_path, table)
    _write_manifest(csv_path, "experiment", params, args.eps, args.threads,
                    time.perf_counter() - t0, _tag_counts(table))
    print(f"wrote {csv_path}")
    ratios = [abs(r.ratio) for r in table.rows if not math.isnan(r.ratio)]
    print(f"max |delta_qc / F_C| = {_fmt(max(ratios))}")
    if not args.no_plot:
        png = out / "experiment.png"
        plot_experiment(table.rows, str(png))
        print(f"wrote {png}")
    return 0 if table.converged else 3


def _add_model_flags(p: argparse.ArgumentParser, need_x: bool = True) -> None:
    p.add_argument("--model", choices=("jc", "ajc", "rabi", "generalized"),
                   required=True)
    p.add_argument("--eta", type=float, default=None,
                   help="rotating-wave fraction g1/(g1+g2); implied by jc/ajc/rabi")
    if need_x:
        p.add_argument("--x", type=float, required=True, help="frequency ratio Omega/omega")
        p.add_argument("--q", type=float, required=True, help="coupling (g1+g2)/gc")
    p.add_argument("--beta", type=float, required=True, help="inverse temperature")
    p.add_argument("--gc", type=float, default=1.0)
    p.add_argument("--hbar", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rabiq",
        description="Quantum-classical free-energy gap of the generalized Rabi model.",
    )
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--eps", type=float, default=1e-10, help="tolerance budget")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seedless", action="store_true",
                        help="accepted for interface compatibility; every "
                             "computation is deterministic and uses no RNG")
    parser.add_argument("--no-plot", action="store_true",
                        help="skip PNG rendering next to data files")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("free-energy", help="single free-energy value")
    _add_model_flags(p)
    p.add_argument("--treatment", choices=("quantum", "classical"), required=True)
    p.add_argument("--method", choices=("numeric", "closed"), required=True)
    p.set_defaults(fn=cmd_free_energy)

    p = sub.add_parser("quantumness", help="single gap value F_Q - F_C")
    _add_model_flags(p)
    p.add_argument("--method", choices=("numeric", "closed"), default="numeric")
    p.set_defaults(fn=cmd_quantumness)

    p = sub.add_parser("scan", help="gap over an x- or q-grid, written to CSV")
    _add_model_flags(p, need_x=False)
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--x-grid", type=lambda s: _grid_arg(s, log=True), default=None,
                   metavar="LO:HI:N", help="log-spaced x grid")
    p.add_argument("--q-grid", type=lambda s: _grid_arg(s, log=False), default=None,
                   metavar="LO:HI:N", help="linear q grid")
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("fit", help="fit A/sqrt(x) + B/x to a scan CSV")
    p.add_argument("--input", required=True)
    p.set_defaults(fn=cmd_fit)

    p = sub.add_parser("figure", help="dataset (and PNG) behind a named panel")
    p.add_argument("--id", required=True,
                   choices=sorted([*_FIG2, *_FIG3, *_FIG4, "5"]))
    p.set_defaults(fn=cmd_figure)

    p = sub.add_parser("table1", help="closed-form cells vs numeric values")
    p.add_argument("--x", type=float, default=1e4)
    p.add_argument("--q", type=float, action="append",
                   help="repeatable; defaults to 0.5 and 1.2")
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--gc", type=float, default=1.0)
    p.add_argument("--hbar", type=float, default=1.0)
    p.set_defaults(fn=cmd_table1)

    p = sub.add_parser("experiment", help="trapped-ion Rabi-model estimate")
    p.add_argument("--omega-khz", type=float, default=4.0)
    p.add_argument("--Omega-khz", dest="capital_omega_khz", type=float, default=100.0)
    p.add_argument("--gc-khz", type=float, default=20.0)
    p.add_argument("--beta-hbar-gc", type=float, default=5.0,
                   help="beta in units of 1/(hbar gc)")
    p.add_argument("--g-max", type=float, default=1.4, help="grid top in units of gc")
    p.add_argument("--points", type=int, default=15)
    p.add_argument("--two-pi", action=argparse.BooleanOptionalAction, default=True,
                   help="interpret the kHz inputs as linear frequencies times 2*pi")
    p.set_defaults(fn=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
