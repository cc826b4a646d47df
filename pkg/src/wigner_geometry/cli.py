"""Command-line front end: ``wigner-geometry compute`` and ``wigner-geometry validate``.

Examples
--------
Metric, curvature and connection of the generalized-oscillator ground state
along a line in Y, written as CSV::

    wigner-geometry compute --model GeneralizedOscillator --point X=1,Z=1 \\
        --sweep "Y=-0.5:0.5:41" --state 0 --out gho.csv

Invariant suite at one point (nonzero exit status on any failure)::

    wigner-geometry validate --model chain.json --point k=1,k\\'=0.5 --state 0,1
"""

import argparse
import csv
import io
import itertools
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .errors import AccuracyWarning, DegeneracyError, ModelDomainError
from .geometry import SCHEMA, qgt_abelian, qgt_nonabelian
from .models import FAMILIES, model_from_config
from .quadrature import FDSpec
from .validation import validate_level, validate_state

__all__ = ["main", "build_parser", "parse_sweep", "sweep_points"]


# ---------------------------------------------------------------- parsing


def _labels(text):
    return tuple(int(v) for v in str(text).replace(" ", "").split(",") if v != "")


def _assignments(text):
    """``"X=1,Y=0.5"`` -> {"X": 1.0, "Y": 0.5}."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, _, value = item.partition("=")
        if not _:
            raise ValueError(f"expected NAME=VALUE, got {item!r}")
        out[name.strip()] = float(value)
    return out


def parse_sweep(text):
    """Parse ``"Y=-0.5:0.5:41"`` (min:max:steps) or ``"Y=[0.1,0.2]"`` (explicit list).

    Returns ``(name, values)`` with ``values`` a 1-D float array.
    """
    name, sep, spec = text.partition("=")
    if not sep:
        raise ValueError(f"sweep needs NAME=..., got {text!r}")
    spec = spec.strip()
    if spec.startswith("["):
        values = np.asarray(json.loads(spec), dtype=float)
    else:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"sweep range must be min:max:steps, got {spec!r}")
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
        if steps < 1:
            raise ValueError("sweep needs at least one step")
        values = np.linspace(lo, hi, steps)
    if values.ndim != 1 or not values.size or not np.all(np.isfinite(values)):
        raise ValueError(f"sweep values for {name!r} must be a finite non-empty list")
    return name.strip(), values


def _sweep_from_config(entry):
    if isinstance(entry, dict):
        return np.linspace(float(entry["min"]), float(entry["max"]), int(entry["steps"]))
    return np.asarray(entry, dtype=float)


def sweep_points(names, point, sweeps):
    """Tensor grid in declared parameter order; later names vary fastest.

    Parameters
    ----------
    names : sequence of str
        Declared parameter names.
    point : dict
        Fixed values.
    sweeps : dict
        name -> 1-D array of values.
    """
    missing = [n for n in names if n not in point and n not in sweeps]
    if missing:
        raise ValueError(f"no value given for parameters {missing}")
    unknown = sorted((set(point) | set(sweeps)) - set(names))
    if unknown:
        raise ValueError(f"unknown parameters {unknown}; model declares {list(names)}")
    axes = [sweeps[n] if n in sweeps else [point[n]] for n in names]
    return [np.array(combo, dtype=float) for combo in itertools.product(*axes)]


def _model_config(arg, hbar):
    path = Path(arg)
    if path.is_file():
        config = json.loads(path.read_text())
    elif arg in FAMILIES:
        config = {"family": arg}
    else:
        raise ValueError(f"--model {arg!r} is neither a JSON file nor one of {FAMILIES}")
    if hbar is not None:
        config = dict(config, hbar=hbar)
    return config


def _selector(args, config):
    """("state", labels) or ("level", selector) from flags, falling back to the config file."""
    if args.level:
        return "level", [_labels(s) for s in args.level.split(";")]
    if args.level_energy_index is not None:
        return "level", int(args.level_energy_index)
    if args.level_of:
        return "level", _labels(args.level_of)
    if args.state:
        return "state", _labels(args.state)
    sel = config.get("selector", {})
    if "level" in sel:
        return "level", [tuple(lab) for lab in sel["level"]]
    if "level_energy_index" in sel:
        return "level", int(sel["level_energy_index"])
    if "state" in sel:
        return "state", tuple(sel["state"])
    return "state", None


# ---------------------------------------------------------------- one grid point


def _compute_point(task):
    """Worker: geometry at one point. Returns a JSON-able record."""
    config, x, kind, selector, methods, nodes, fd_step = task
    model = model_from_config(config)
    fd = FDSpec(step=fd_step) if fd_step is not None else None
    record = {"x": [float(v) for v in x], "status": "ok", "results": {}}
    if kind == "state" and selector is None:
        selector = (0,) * model.n_modes
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", AccuracyWarning)
            for method in methods:
                if kind == "state":
                    res = qgt_abelian(model, x, selector, method, nodes=nodes, fd=fd)
                else:
                    res = qgt_nonabelian(model, x, selector, method, nodes=nodes, fd=fd)
                record["results"][method] = res.to_dict()
        if caught:
            record["warnings"] = sorted({str(w.message) for w in caught})
    except ModelDomainError as exc:
        return {"x": record["x"], "status": "domain", "error": str(exc), "results": {}}
    except DegeneracyError as exc:
        return {"x": record["x"], "status": "degenerate", "error": str(exc), "results": {}}
    if len(methods) == 2:
        a, b = (record["results"][m] for m in methods)
        record["discrepancy"] = {
            key: _max_diff(a[key], b[key]) for key in ("Q", "g", "F", "A")
        }
    return record


def _array(d):
    re = np.array(d["re"], dtype=float).reshape(d["shape"])
    return re + 1j * np.array(d["im"], dtype=float).reshape(d["shape"]) if "im" in d else re


def _max_diff(a, b):
    return float(np.max(np.abs(_array(a) - _array(b))))


# ---------------------------------------------------------------- output


def _index(*idx):
    return "".join(str(i + 1) for i in idx)


def _value_columns(result):
    """Ordered (name, value) pairs of one result: g, F (i < j), A."""
    g, F, A = (_array(result[k]) for k in ("g", "F", "A"))
    m = g.shape[0]
    cols = []
    if g.ndim == 2:
        cols += [(f"g{_index(i, j)}", g[i, j]) for i in range(m) for j in range(m)]
        cols += [(f"F{_index(i, j)}", F[i, j]) for i in range(m) for j in range(i + 1, m)]
        cols += [(f"A{_index(i)}", A[i]) for i in range(m)]
        return cols
    n = g.shape[2]
    pairs = [(I, J) for I in range(n) for J in range(n)]

    def cplx(name, v):
        return [(f"{name}_re", v.real), (f"{name}_im", v.imag)]

    for i, j in itertools.product(range(m), repeat=2):
        for I, J in pairs:
            cols += cplx(f"g{_index(i, j)}_{_index(I, J)}", g[i, j, I, J])
    for i in range(m):
        for j in range(i + 1, m):
            for I, J in pairs:
                cols += cplx(f"F{_index(i, j)}_{_index(I, J)}", F[i, j, I, J])
    for i in range(m):
        for I, J in pairs:
            cols += cplx(f"A{_index(i)}_{_index(I, J)}", A[i, I, J])
    return cols


def _write_csv(stream, names, records, methods):
    template = None
    for rec in records:
        if rec["results"]:
            template = _value_columns(rec["results"][methods[0]])
            break
    value_names = [name for name, _ in template] if template else []
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(list(names) + ["method", "status"] + value_names)
    for rec in records:
        for method in methods:
            row = [repr(v) for v in rec["x"]] + [method, rec["status"]]
            if rec["results"]:
                row += [repr(float(v)) for _, v in _value_columns(rec["results"][method])]
            else:
                row += [""] * len(value_names)
            writer.writerow(row)


def _summary(records):
    counts = {"points": len(records)}
    for status in ("ok", "domain", "degenerate"):
        counts[status] = sum(r["status"] == status for r in records)
    counts["failures"] = [
        {"x": r["x"], "status": r["status"], "error": r.get("error", "")} for r in records if r["status"] != "ok"
    ]
    return counts


def _discrepancy_report(names, records):
    rows = [{"x": r["x"], **r["discrepancy"]} for r in records if "discrepancy" in r]
    worst = {k: max((row[k] for row in rows), default=0.0) for k in ("Q", "g", "F", "A")}
    return {"schema": SCHEMA, "param_names": list(names), "max": worst, "points": rows}


def _emit(text, out):
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------- commands


def cmd_compute(args):
    config = _model_config(args.model, args.hbar)
    model = model_from_config(config)
    names = model.param_names
    point = dict(config.get("point", {}))
    if args.point:
        point.update(_assignments(args.point))
    sweeps = {k: _sweep_from_config(v) for k, v in config.get("sweep", {}).items()}
    for text in args.sweep or []:
        name, values = parse_sweep(text)
        sweeps[name] = values
    point = {k: v for k, v in point.items() if k not in sweeps}
    grid = sweep_points(names, point, sweeps)
    kind, selector = _selector(args, config)
    methods = ["analytic", "quadrature"] if args.method == "both" else [args.method]
    tasks = [(config, x, kind, selector, methods, args.nodes, args.fd_step) for x in grid]

    if args.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            records = list(pool.map(_compute_point, tasks))
    else:
        records = [_compute_point(t) for t in tasks]

    summary = _summary(records)
    out = args.out
    fmt = "csv" if out is not None and str(out).endswith(".csv") else "json"
    if fmt == "csv":
        buf = io.StringIO()
        _write_csv(buf, names, records, methods)
        _emit(buf.getvalue(), out)
    else:
        doc = {
            "schema": SCHEMA,
            "model": {k: v for k, v in config.items() if k not in ("point", "sweep", "selector")},
            "param_names": list(names),
            "selector": {kind: selector if not isinstance(selector, list) else [list(s) for s in selector]},
            "methods": methods,
            "points": records,
            "summary": summary,
        }
        _emit(json.dumps(doc, indent=1) + "\n", out)
    if len(methods) == 2:
        report = json.dumps(_discrepancy_report(names, records), indent=1) + "\n"
        if out is None or str(out) == "-":
            sys.stderr.write(report)
        else:
            Path(out).with_suffix(".discrepancy.json").write_text(report)

    line = " ".join(f"{k}={summary[k]}" for k in ("points", "ok", "domain", "degenerate"))
    print(f"summary: {line}", file=sys.stderr)
    for fail in summary["failures"]:
        print(f"  {fail['status']} at {fail['x']}: {fail['error']}", file=sys.stderr)
    return 0


def cmd_validate(args):
    config = _model_config(args.model, args.hbar)
    model = model_from_config(config)
    point = dict(config.get("point", {}))
    if args.point:
        point.update(_assignments(args.point))
    (x,) = sweep_points(model.param_names, point, {})
    kind, selector = _selector(args, config)
    fd = FDSpec(step=args.fd_step) if args.fd_step is not None else None
    report = {
        "schema": SCHEMA,
        "model": model.family,
        "hbar": model.hbar,
        "param_names": list(model.param_names),
        "x": [float(v) for v in x],
        "nodes": args.nodes,
    }
    try:
        if kind == "state":
            labels = selector if selector is not None else (0,) * model.n_modes
            report["state"] = list(labels)
            checks = validate_state(model, x, labels, nodes=args.nodes, fd=fd)
        else:
            report["level"] = selector if not isinstance(selector, list) else [list(s) for s in selector]
            checks = validate_level(model, x, selector, nodes=args.nodes, fd=fd)
    except (ModelDomainError, DegeneracyError) as exc:
        report.update(checks=[], passed=False, error=str(exc))
    else:
        report["checks"] = [c.as_dict() for c in checks]
        report["passed"] = all(c.passed for c in checks)
    _emit(json.dumps(report, indent=1) + "\n", args.out)
    for c in report["checks"]:
        status = "pass" if c["passed"] else "FAIL"
        print(f"{status} {c['name']}: {c['error']:.3g} (tol {c['tolerance']:.0e})", file=sys.stderr)
    if "error" in report:
        print(f"FAIL {report['error']}", file=sys.stderr)
    return 0 if report["passed"] else 1


# ---------------------------------------------------------------- entry point


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wigner-geometry",
        description="Quantum geometric tensors, Berry curvature and connections in phase space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", required=True, help="JSON model file or a family name")
    common.add_argument("--point", help='fixed parameter values, e.g. "X=1,Y=0,Z=1"')
    sel = common.add_mutually_exclusive_group()
    sel.add_argument("--state", help='quantum numbers of a nondegenerate state, e.g. "0,0,1"')
    sel.add_argument("--level-energy-index", type=int, help="degenerate level by distinct-energy index (0 = ground)")
    sel.add_argument("--level-of", help="degenerate level containing this state")
    sel.add_argument("--level", help='explicit level basis, e.g. "0,0,1;0,1,0"')
    common.add_argument("--nodes", type=_positive_int, help="phase-space and Weyl nodes per dimension")
    common.add_argument("--fd-step", type=_positive_float, help="relative finite-difference step")
    common.add_argument("--hbar", type=_positive_float, help="override the model's hbar")
    common.add_argument("--out", help="output path (.csv or .json); default stdout")

    comp = sub.add_parser("compute", parents=[common], help="compute geometry at a point or over a sweep")
    comp.add_argument("--sweep", action="append", help='"NAME=min:max:steps" or "NAME=[v1,v2,...]"; repeatable')
    comp.add_argument("--method", choices=["analytic", "quadrature", "both"], default="analytic")
    comp.add_argument("--workers", type=_positive_int, default=1, help="worker processes for sweeps")
    comp.set_defaults(func=cmd_compute)

    val = sub.add_parser("validate", parents=[common], help="run the invariant suite at one point")
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"wigner-geometry: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
