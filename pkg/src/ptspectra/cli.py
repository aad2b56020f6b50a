"""Command-line interface.

Exit codes: 0 ok, 2 input error, 3 regime refusal, 4 numerical failure.
JSON goes to stdout; CSV artifacts go to ``--out`` (stdout when omitted
and the command has no JSON report).
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .grid import FD_ORDERS, PiecewiseFunction, from_closure, to_csv
from .interval import IntervalModel, RegimeError, classify, eigenvalues_in_region, rootset_to_csv
from .line_model import (
    LineModel,
    bc_compatible_gaussian,
    eigen_residual,
    interface_residual,
    intertwining_residual,
    metric_invertible,
    metric_spectrum,
    point_spectrum_member,
    weyl_residual,
)
from .resolvent import ResolventContext, apply_resolvent, default_source, resolvent_residual
from .roots import ContourZeroError, Rectangle, RootConfig

EXIT_OK, EXIT_INPUT, EXIT_REGIME, EXIT_NUMERIC = 0, 2, 3, 4


class InputError(ValueError):
    pass


def _num(v):
    """JSON-ready value; floats keep the shortest round-trip representation."""
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, dict):
        return {k: _num(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_num(x) for x in v]
    return v


def _emit(report: dict, args) -> None:
    if not args.no_timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
    json.dump(_num(report), sys.stdout, sort_keys=True)
    sys.stdout.write("\n")


def _write(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise InputError(f"not a complex number: {text!r}") from exc


def load_model(text: str) -> IntervalModel:
    """Model from a JSON file path or an inline JSON string."""
    if text is None:
        raise InputError("--model is required")
    src = text
    if not text.lstrip().startswith("{"):
        p = Path(text)
        if not p.exists():
            raise InputError(f"model file not found: {text}")
        src = p.read_text()
    try:
        return IntervalModel.from_dict(json.loads(src))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid model: {exc}") from exc


def _grid_n(args, default: int) -> int:
    n = args.grid_n if args.grid_n is not None else default
    if n < 64:
        raise InputError("--grid-n must be at least 64")
    m = 4 if args.fd_order == 6 else 2
    if n % m:
        raise InputError(f"--grid-n must be a multiple of {m} for --fd-order {args.fd_order}")
    return n


# -- commands -----------------------------------------------------------------

def cmd_classify(args) -> int:
    model = load_model(args.model)
    report = classify(model).to_dict()
    report["model"] = model.to_dict()
    _emit(report, args)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    model = load_model(args.model)
    try:
        region = Rectangle.parse(args.region)
    except (ValueError, TypeError) as exc:
        raise InputError(f"invalid --region: {exc}") from exc
    rs = eigenvalues_in_region(model, region, RootConfig(edge_samples=args.edge_samples))
    _write(rootset_to_csv(rs), args.out)
    return EXIT_OK


def cmd_line_demo(args) -> int:
    model = LineModel(args.phi)
    lam = parse_complex(args.lam)
    grid_n = _grid_n(args, 4096)
    f = point_spectrum_member(lam, model, grid_n=grid_n, fd_order=args.fd_order)
    report = {"phi": model.phi, "lambda": lam, "member": f is not None}
    if f is None:
        report["reason"] = "no square-integrable eigenfunction (phi != +-pi/2 or lambda in [0, inf))"
        _emit(report, args)
        return EXIT_REGIME
    report["k"] = cmath.sqrt(-lam)
    report["interface_residual"] = interface_residual(f, model)
    report["eigen_residual"] = eigen_residual(f, lam)
    report["samples_per_side"] = f.grid_n
    if args.out:
        _write(to_csv(f), args.out)
    _emit(report, args)
    return EXIT_OK


def cmd_metric(args) -> int:
    model = LineModel(args.phi)
    grid_n = _grid_n(args, 4096)
    f = bc_compatible_gaussian(model, grid_n=grid_n, fd_order=args.fd_order)
    res = intertwining_residual(model, f)
    report = {
        "phi": model.phi,
        "eigenvalues": list(metric_spectrum(model)),
        "invertible": metric_invertible(model),
        "intertwining_residual": res.commutator,
        "adjoint_bc_residual": res.adjoint_bc,
    }
    _emit(report, args)
    return EXIT_OK


def cmd_weyl(args) -> int:
    try:
        ns = [int(v) for v in args.n.split(",")]
    except ValueError as exc:
        raise InputError(f"invalid --n list: {args.n}") from exc
    if any(n < 2 for n in ns):
        raise InputError("every n must be at least 2")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "n", "residual", "bound", "ratio_to_previous"])
    prev = None
    for n in ns:
        r = weyl_residual(args.k, n)
        ratio = "" if prev is None else format(r.residual / prev, ".17g")
        w.writerow([format(args.k, ".17g"), n, format(r.residual, ".17g"), format(r.bound, ".17g"), ratio])
        prev = r.residual
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def _load_source(source: str, l: float, grid_n: int, fd_order: int) -> PiecewiseFunction:
    if source == "gaussian":
        return default_source(l, grid_n, fd_order)
    p = Path(source)
    if not p.exists():
        raise InputError(f"--g must be 'gaussian' or a CSV path: {source}")
    rows = [r for r in csv.reader(line for line in p.read_text().splitlines() if not line.startswith("#"))]
    try:
        data = np.array([[float(r[0]), float(r[1]), float(r[2])] for r in rows[1:]])
    except (ValueError, IndexError) as exc:
        raise InputError(f"malformed g CSV: {exc}") from exc
    side = np.array([r[3] for r in rows[1:]])
    xl, xr = data[side == "L"], data[side == "R"]
    if len(xl) != len(xr) or len(xl) < 65:
        raise InputError("g CSV needs equal sample counts on both sides")
    if not (math.isclose(xl[0, 0], -l) and math.isclose(xr[-1, 0], l)):
        raise InputError(f"g CSV must cover (-{l}, {l})")
    lv, rv = xl[:, 1] + 1j * xl[:, 2], xr[:, 1] + 1j * xr[:, 2]
    # derivative traces are not needed by the resolvent
    fl = lambda x: np.interp(x, xl[:, 0], lv.real) + 1j * np.interp(x, xl[:, 0], lv.imag)
    fr = lambda x: np.interp(x, xr[:, 0], rv.real) + 1j * np.interp(x, xr[:, 0], rv.imag)
    zero = lambda x: np.zeros_like(x, dtype=complex)
    return from_closure((fl, fr), (zero, zero), -l, l, len(xl) - 1, fd_order)


def cmd_resolvent(args) -> int:
    model = load_model(args.model)
    lam = parse_complex(args.lam)
    grid_n = _grid_n(args, 2048)
    try:
        ctx = ResolventContext.from_lambda(model, lam)
    except TypeError as exc:
        raise InputError(str(exc)) from exc
    g = _load_source(args.g, model.l, grid_n, args.fd_order)
    res = apply_resolvent(ctx, g)
    report = {"lambda": lam, "k": ctx.k, "c_minus": res.c_minus, "c_plus": res.c_plus}
    report["residuals"] = resolvent_residual(ctx, g, res.function)
    if args.out:
        _write(to_csv(res.function), args.out)
    _emit(report, args)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid-n", type=int, default=None, help="samples per side")
    common.add_argument("--fd-order", type=int, default=4, choices=FD_ORDERS)
    common.add_argument("--out", default=None, help="output path for CSV artifacts")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")

    p = argparse.ArgumentParser(prog="ptspectra", description="Spectra of point-interaction operators.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", parents=[common], help="spectral class of an interval model")
    s.add_argument("--model", required=True)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("spectrum", parents=[common], help="eigenvalues in a k-rectangle (CSV)")
    s.add_argument("--model", required=True)
    s.add_argument("--region", required=True, help="re_min,re_max,im_min,im_max in the k-plane")
    s.add_argument("--edge-samples", type=int, default=64)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("line-demo", parents=[common], help="eigenfunction of the line model")
    s.add_argument("--phi", type=float, required=True)
    s.add_argument("--lambda", dest="lam", required=True)
    s.set_defaults(func=cmd_line_demo)

    s = sub.add_parser("metric", parents=[common], help="metric operator spectrum and intertwining")
    s.add_argument("--phi", type=float, required=True)
    s.set_defaults(func=cmd_metric)

    s = sub.add_parser("weyl", parents=[common], help="Weyl-sequence residual table (CSV)")
    s.add_argument("--k", type=float, default=1.0)
    s.add_argument("--n", default="4,8,16,32", help="comma-separated n values")
    s.set_defaults(func=cmd_weyl)

    s = sub.add_parser("resolvent", parents=[common], help="apply the resolvent (separated outer)")
    s.add_argument("--model", required=True)
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--g", default="gaussian", help="'gaussian' or a CSV file in the export format")
    s.set_defaults(func=cmd_resolvent)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RegimeError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (ContourZeroError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
