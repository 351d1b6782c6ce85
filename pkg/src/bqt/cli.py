"""Command-line front end: compute, sweep, verify.

Exit codes: 0 success, 1 verification failure, 2 invalid arguments or
unwritable output, 3 solver failure.
"""

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import analytic
from .protocols import Kpf16Params, kpf16_error
from .qmat import DimensionError, NotPSDError
from .sdp import SolverError, SolverOptions
from .simerr import ErrorReport, eppt_swap
from .states import ResourceState, load_resource

EXIT_OK, EXIT_VERIFY, EXIT_ARGS, EXIT_SOLVER = 0, 1, 2, 3

# Parameter axes per resource kind, in CSV column order.
AXES = {
    "none": ("d",),
    "isotropic": ("F", "dA", "d"),
    "werner": ("p", "dA", "d"),
    "gadc": ("gamma", "N", "d"),
    "custom": ("d",),
    "kpf16": ("p1", "p2"),
}
INT_AXES = {"d", "dA"}
METHODS = {
    "none": ("analytic", "lp", "sdp"),
    "isotropic": ("analytic", "lp", "sdp"),
    "werner": ("analytic", "lp", "sdp"),
    "gadc": ("analytic", "sdp"),
    "custom": ("sdp",),
    "kpf16": ("sdp",),
}
DEFAULTS = {"d": 2}


class UsageError(ValueError):
    pass


def _resource(kind, params, path=None):
    if kind == "none":
        return ResourceState.none()
    if kind == "isotropic":
        return ResourceState.isotropic(params["F"], params["dA"])
    if kind == "werner":
        return ResourceState.werner(params["p"], params["dA"])
    if kind == "gadc":
        return ResourceState.gadc(params["gamma"], params["N"])
    if kind == "custom":
        if not path:
            raise UsageError("--resource custom needs --file")
        return load_resource(path)
    raise UsageError(f"no resource state for kind {kind!r}")


def _closed_form(kind, p):
    if kind == "none":
        return analytic.no_resource_error(p["d"])
    if kind == "isotropic":
        return analytic.isotropic_error(p["F"], p["dA"], p["d"])
    if kind == "werner":
        return analytic.werner_error(p["p"], p["dA"], p["d"])
    if kind == "gadc":
        if p["d"] != 2:
            raise UsageError("the GADC closed form holds for d = 2 only")
        return analytic.gadc_error(p["gamma"], p["N"])
    raise UsageError(f"no closed form for {kind!r}")


def _lp(kind, p):
    if kind == "none":
        return analytic.build_no_resource_lp(p["d"])
    if kind == "isotropic":
        return analytic.build_isotropic_lp(p["F"], p["dA"], p["d"])
    if kind == "werner":
        return analytic.build_werner_lp(p["p"], p["dA"], p["d"])
    raise UsageError(f"no LP reduction for {kind!r}")


def evaluate(kind, params, method, opts=None, path=None):
    """One simulation error as an ErrorReport."""
    if method not in METHODS[kind]:
        raise UsageError(f"method {method!r} is not available for resource {kind!r}")
    if kind == "kpf16":
        return kpf16_error(Kpf16Params(params["p1"], params["p2"]), opts=opts, report=True)
    target = f"swap-{params['d']}"
    if method == "analytic":
        v = _closed_form(kind, params)
        desc = _resource(kind, params).describe()
        return ErrorReport(v, "analytic", 0.0, "optimal", v, v, {}, desc, target, "closed-form")
    rho = _resource(kind, params, path)
    if method == "lp":
        return analytic.lp_error(_lp(kind, params), rho, target)
    return eppt_swap(rho, params["d"], opts=opts)


# ---------------------------------------------------------------------------
# argument handling


def _parse_axis(name, text):
    """'x', 'a,b,c' or 'start:stop:steps' (steps optional for integer axes)."""
    text = str(text).strip()
    is_int = name in INT_AXES
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) == 2 and is_int:
                lo, hi = int(parts[0]), int(parts[1])
                vals = list(range(lo, hi + 1))
            elif len(parts) == 3:
                lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
                if n < 1:
                    raise UsageError(f"--{name}: steps must be >= 1")
                vals = list(np.linspace(lo, hi, n)) if n > 1 else [lo]
            else:
                raise UsageError(f"--{name}: expected start:stop:steps, got {text!r}")
        else:
            vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"--{name}: {exc}") from None
    if not vals:
        raise UsageError(f"--{name}: empty range")
    if is_int:
        if any(v != round(v) for v in vals):
            raise UsageError(f"--{name} takes integers, got {text!r}")
        vals = [int(round(v)) for v in vals]
    else:
        vals = [float(v) for v in vals]
    return vals


def _methods(kind, text):
    names = [m.strip() for m in text.split(",") if m.strip()]
    if names == ["all"]:
        return list(METHODS[kind])
    for m in names:
        if m not in ("analytic", "lp", "sdp"):
            raise UsageError(f"unknown method {m!r}")
        if m not in METHODS[kind]:
            raise UsageError(f"method {m!r} is not available for resource {kind!r}")
    if not names:
        raise UsageError("no method given")
    return names


def _grid(kind, args, single):
    axes = []
    for name in AXES[kind]:
        raw = getattr(args, name)
        if raw is None:
            if name not in DEFAULTS:
                raise UsageError(f"--resource {kind} needs --{name}")
            raw = str(DEFAULTS[name])
        vals = _parse_axis(name, raw)
        if single and len(vals) != 1:
            raise UsageError(f"compute takes one value per parameter, got {len(vals)} for --{name}")
        axes.append(vals)
    return [dict(zip(AXES[kind], combo)) for combo in itertools.product(*axes)]


def _options(args):
    opts = SolverOptions.from_env()
    kw = {}
    if args.feas_tol is not None:
        kw["feas_tol"] = args.feas_tol
    if args.gap_tol is not None:
        kw["gap_tol"] = args.gap_tol
    return replace(opts, **kw)


def _fmt(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


# ---------------------------------------------------------------------------
# commands


def cmd_compute(args):
    kind = args.resource
    methods = _methods(kind, args.method)
    (params,) = _grid(kind, args, single=True)
    opts = _options(args)
    reports = [evaluate(kind, params, m, opts, args.file) for m in methods]
    docs = []
    for m, rep in zip(methods, reports):
        doc = rep.to_json(certificate=args.certificate)
        doc["requested"] = m
        doc["params"] = params
        docs.append(doc)
    text = json.dumps(docs[0] if len(docs) == 1 else docs, indent=2, sort_keys=True)
    _write(args.out, text + "\n")
    bad = [r for r in reports if not r.ok]
    if bad:
        print(f"solver status {bad[0].status} for method {bad[0].method}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    points: tuple  # parameter dicts in lexicographic grid order
    methods: tuple
    out: str = None
    file: str = None


def _sweep_task(task):
    idx, kind, params, method, opts, path = task
    rep = evaluate(kind, params, method, opts, path)
    return idx, rep.value, rep.gap, rep.status


def run_sweep(spec, opts, jobs=1):
    """Rows (params..., method, value, gap) in grid order; raises SolverError on failure."""
    tasks = [(i, spec.kind, p, m, opts, spec.file)
             for i, (p, m) in enumerate(itertools.product(spec.points, spec.methods))]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    rows = []
    for (idx, value, gap, status), (_, _, p, m, _, _) in zip(results, tasks):
        if status != "optimal":
            raise SolverError(f"{m} at {p}: solver status {status}")
        rows.append([p[a] for a in AXES[spec.kind]] + [m, value, gap])
    return rows


def sweep_csv(spec, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(AXES[spec.kind]) + ["method", "value", "gap"])
    for r in rows:
        w.writerow([_fmt(x) if not isinstance(x, str) else x for x in r])
    return buf.getvalue()


def cmd_sweep(args):
    kind = args.resource
    spec = SweepSpec(kind, tuple(_grid(kind, args, single=False)),
                     tuple(_methods(kind, args.method)), args.out, args.file)
    jobs = args.jobs or os.cpu_count() or 1
    rows = run_sweep(spec, _options(args), jobs)
    _write(args.out, sweep_csv(spec, rows))
    return EXIT_OK


def cmd_verify(args):
    from .verify import CHECKS, run_checks

    only = None
    if args.only:
        only = [s.strip() for s in args.only.split(",") if s.strip()]
        unknown = [s for s in only if s not in CHECKS]
        if unknown:
            raise UsageError(f"unknown check(s) {unknown}; available: {sorted(CHECKS)}")
    summary = run_checks(only, _options(args), tol=args.tol)
    _write(args.out, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    for c in summary["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}", file=sys.stderr)
    return EXIT_OK if summary["passed"] else EXIT_VERIFY


def _write(path, text):
    if not path or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _add_params(p):
    p.add_argument("--resource", required=True, choices=sorted(AXES))
    for name in ("F", "p", "gamma", "N", "dA", "d", "p1", "p2"):
        p.add_argument(f"--{name}", dest=name, default=None)
    p.add_argument("--file", help="JSON resource state for --resource custom")
    p.add_argument("--method", default="all")


def _add_solver(p):
    p.add_argument("--feas-tol", type=float, default=None)
    p.add_argument("--gap-tol", type=float, default=None)


def build_parser():
    ap = argparse.ArgumentParser(prog="bqt", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="one simulation error, printed as JSON")
    _add_params(c)
    _add_solver(c)
    c.add_argument("--out", default=None)
    c.add_argument("--certificate", action="store_true", help="include certificate blocks")
    c.set_defaults(func=cmd_compute)

    s = sub.add_parser("sweep", help="parameter grid to CSV")
    _add_params(s)
    _add_solver(s)
    s.add_argument("--out", default=None)
    s.add_argument("--jobs", type=int, default=None)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--only", default=None, help="comma-separated check names")
    v.add_argument("--tol", type=float, default=None, help="override every check tolerance")
    v.add_argument("--out", default=None)
    _add_solver(v)
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, DimensionError, NotPSDError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
