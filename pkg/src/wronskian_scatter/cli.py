"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 domain or input error, 3 failed
validation suite.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .errors import AllPointsFailed, ScatterError
from .integrator import IntegrationConfig
from .potentials import Family, PotentialModel, load_tabulated_file, make_model
from .resonance import default_jobs, find_resonances, scan
from .scattering import scatter
from .validation import ValidationConfig, run_all
from .wronskian import PlateauConfig

CSV_HEADER = "axis,T,reflection,k1,k3,det_res,symp_res,plateau_res,unitarity_defect,x_range,status"
NUMERIC_FIELDS = ("T", "reflection", "k1", "k3", "det_res", "symp_res", "plateau_res",
                  "unitarity_defect", "x_range")
PEAK_HEADER = "v0,T,half_width,epsilon"
# flags that change how a run executes but not what it computes
NOT_ECHOED = ("output", "jobs", "func")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_model_flags(p, require_potential=True):
    p.add_argument("--potential", required=require_potential,
                   choices=[f.value for f in Family])
    p.add_argument("--v0", type=float, default=None, help="depth or height (dimensionless)")
    p.add_argument("--width", type=float, default=1.0, help="square barrier width")
    p.add_argument("--v-minus", type=float, default=0.0, help="step: level for x < 0")
    p.add_argument("--v-plus", type=float, default=0.0, help="step: level for x > 0")
    p.add_argument("--file", default=None, help="tabulated potential file")


def _add_numeric_flags(p):
    p.add_argument("--h", type=float, default=0.01, help="RK4 step (default 0.01)")
    p.add_argument("--plateau-tol", type=float, default=1e-8)
    p.add_argument("--window", type=int, default=50)
    p.add_argument("--x-max", type=float, default=5.0,
                   help="initial half-range; doubled up to 20 until plateaus settle")


def _add_output_flags(p, jobs=False):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None, help="write here instead of stdout")
    if jobs:
        p.add_argument("--jobs", type=int, default=None,
                       help="worker processes (default: $WRONSKIAN_SCATTER_JOBS or CPU count)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wronskian-scatter",
                     description="1D transmission probabilities by Wronskian connection matrices")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("transmit", help="transmission at a single energy")
    _add_model_flags(p)
    p.add_argument("--epsilon", type=float, required=True)
    _add_numeric_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_transmit)

    p = sub.add_parser("scan", help="T over a range of energy or depth")
    _add_model_flags(p)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--axis", choices=("epsilon", "v0"), required=True)
    p.add_argument("--min", type=float, required=True)
    p.add_argument("--max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    _add_numeric_flags(p)
    _add_output_flags(p, jobs=True)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("resonances", help="locate full-transmission depths at fixed energy")
    _add_model_flags(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--v0-min", type=float, default=0.0)
    p.add_argument("--v0-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--min-T", type=float, default=0.99, dest="min_T")
    p.add_argument("--xtol", type=float, default=1e-6)
    _add_numeric_flags(p)
    _add_output_flags(p, jobs=True)
    p.set_defaults(func=cmd_resonances)

    p = sub.add_parser("validate", help="run the self-check suites")
    _add_model_flags(p, require_potential=False)
    _add_numeric_flags(p)
    p.add_argument("--sech2-tol", type=float, default=1e-5)
    p.add_argument("--step-tol", type=float, default=1e-5)
    p.add_argument("--square-tol", type=float, default=1e-6)
    p.add_argument("--matrix-tol", type=float, default=1e-8)
    p.add_argument("--unitarity-tol", type=float, default=1e-7)
    p.add_argument("--route-tol", type=float, default=1e-9)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_validate)
    return parser


def _configs(args):
    if not (args.h > 0 and math.isfinite(args.h)):
        raise UsageError("--h must be a positive step")
    try:
        cfg = IntegrationConfig(h=args.h, x_max=args.x_max,
                                hard_x_limit=max(20.0, args.x_max),
                                max_steps_per_side=max(2000, math.ceil(max(20.0, args.x_max) / args.h)))
        pcfg = PlateauConfig(tol=args.plateau_tol, window=args.window)
    except ScatterError as exc:
        raise UsageError(str(exc)) from None
    return cfg, pcfg


def _load_table(args):
    if args.file is None:
        raise UsageError("--potential tabulated needs --file")
    return load_tabulated_file(args.file)


def _model(args, v0=None) -> PotentialModel:
    fam = Family(args.potential)
    table = _load_table(args) if fam is Family.TABULATED else None
    v0 = args.v0 if v0 is None else v0
    needs_v0 = fam in (Family.GAUSSIAN_BARRIER, Family.GAUSSIAN_WELL,
                       Family.SECH2_WELL, Family.SQUARE_BARRIER)
    if needs_v0 and v0 is None:
        raise UsageError(f"--potential {fam.value} needs --v0")
    return make_model(fam, v0=v0 or 0.0, width=args.width, v_minus=args.v_minus,
                      v_plus=args.v_plus, table=table)


def _fmt(v) -> str:
    return repr(float(v))


def record(axis_value, outcome=None, status="ok") -> dict:
    rec = {"axis": float(axis_value)}
    if outcome is None:
        rec.update({k: None for k in NUMERIC_FIELDS})
    else:
        rec.update(
            T=outcome.T, reflection=outcome.reflection, k1=outcome.k1, k3=outcome.k3,
            det_res=outcome.det_residual, symp_res=outcome.symplectic_residual,
            plateau_res=outcome.plateau_residual, unitarity_defect=outcome.unitarity_defect,
            x_range=f"{_fmt(outcome.x_range[0])}:{_fmt(outcome.x_range[1])}",
        )
    rec["status"] = status
    return rec


def _csv_row(rec) -> str:
    cells = [_fmt(rec["axis"])]
    for key in NUMERIC_FIELDS:
        v = rec[key]
        cells.append("" if v is None else (v if isinstance(v, str) else _fmt(v)))
    cells.append(rec["status"])
    return ",".join(cells)


def _meta(args, command) -> dict:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in NOT_ECHOED}
    return {"tool": "wronskian-scatter", "version": __version__, "command": command,
            "flags": flags}


def _emit(args, text):
    if args.output:
        with open(args.output, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render_records(args, command, records) -> str:
    if args.format == "json":
        doc = {"meta": _meta(args, command), "records": records}
        return json.dumps(doc, indent=2) + "\n"
    lines = [CSV_HEADER] + [_csv_row(r) for r in records]
    return "\n".join(lines) + "\n"


def _jobs(args) -> int:
    if getattr(args, "jobs", None) is not None:
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        return args.jobs
    return default_jobs()


def cmd_transmit(args) -> int:
    cfg, pcfg = _configs(args)
    model = _model(args)
    try:
        out = scatter(model, args.epsilon, cfg, pcfg)
        rec = record(args.epsilon, out)
    except ScatterError as exc:
        if exc.status == "error":
            raise
        print(f"wronskian-scatter: {exc}", file=sys.stderr)
        rec = record(args.epsilon, None, exc.status)
    _emit(args, _render_records(args, "transmit", [rec]))
    return 0 if rec["status"] == "ok" else 2


def cmd_scan(args) -> int:
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    if not args.min < args.max:
        raise UsageError("--min must be below --max")
    if args.axis == "v0" and args.epsilon is None:
        raise UsageError("--axis v0 needs --epsilon")
    if args.axis == "epsilon" and args.epsilon is not None:
        raise UsageError("--epsilon is the scan axis; drop it")
    cfg, pcfg = _configs(args)
    jobs = _jobs(args)
    model = _model(args, v0=0.0 if args.axis == "v0" else None)
    try:
        res = scan(model.family, args.axis, args.min, args.max, args.steps,
                   v0=model.v0, epsilon=args.epsilon, width=model.width,
                   v_minus=model.v_minus, v_plus=model.v_plus, table=model.table,
                   cfg=cfg, pcfg=pcfg, jobs=jobs)
    except AllPointsFailed as exc:
        print(f"wronskian-scatter: {exc}", file=sys.stderr)
        return 2
    records = [record(p, o, s) for p, o, s in zip(res.points.tolist(), res.outcomes, res.statuses)]
    _emit(args, _render_records(args, "scan", records))
    return 0


def cmd_resonances(args) -> int:
    fam = Family(args.potential)
    if fam in (Family.TABULATED, Family.STEP, Family.FREE):
        raise UsageError(f"depth scans are not defined for --potential {fam.value}")
    if not args.v0_min < args.v0_max:
        raise UsageError("--v0-min must be below --v0-max")
    if args.steps < 3:
        raise UsageError("--steps must be at least 3")
    cfg, pcfg = _configs(args)
    jobs = _jobs(args)
    try:
        peaks = find_resonances(fam, args.epsilon, args.v0_min, args.v0_max, args.steps,
                                args.min_T, args.xtol, width=args.width, cfg=cfg,
                                pcfg=pcfg, jobs=jobs)
    except AllPointsFailed as exc:
        print(f"wronskian-scatter: {exc}", file=sys.stderr)
        return 2
    rows = [{"v0": p.v0_location, "T": float(p.T_at_peak), "half_width": p.half_width,
             "epsilon": p.epsilon} for p in peaks]
    if args.format == "json":
        text = json.dumps({"meta": _meta(args, "resonances"), "peaks": rows}, indent=2) + "\n"
    else:
        lines = [PEAK_HEADER] + [",".join(_fmt(r[k]) for k in PEAK_HEADER.split(",")) for r in rows]
        text = "\n".join(lines) + "\n"
    _emit(args, text)
    return 0


def cmd_validate(args) -> int:
    cfg, pcfg = _configs(args)
    extra = _model(args) if args.potential else None
    vc = ValidationConfig(cfg=cfg, pcfg=pcfg, sech2_tol=args.sech2_tol, step_tol=args.step_tol,
                          square_tol=args.square_tol, matrix_tol=args.matrix_tol,
                          unitarity_tol=args.unitarity_tol, route_tol=args.route_tol,
                          extra_model=extra)
    results = run_all(vc)
    if args.format == "json":
        doc = {"meta": _meta(args, "validate"),
               "suites": [{"name": r.name, "passed": r.passed,
                           "worst": r.worst if math.isfinite(r.worst) else None,
                           "tol": r.tol, "failures": r.failures} for r in results]}
        text = json.dumps(doc, indent=2) + "\n"
    else:
        text = "\n".join(r.line() for r in results) + "\n"
    _emit(args, text)
    return 0 if all(r.passed for r in results) else 3


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"wronskian-scatter: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ScatterError) as exc:
        print(f"wronskian-scatter: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
