"""Command-line front end.

Every subcommand prints one JSON object with the keys ``command``,
``inputs``, ``results``, ``residuals`` and ``pass`` (streamlines and grids
can be written as CSV instead).  Exit codes:

    0  success / all checks passed
    1  a check ran but failed
    2  unparsable expression or bad argument
    3  domain error while evaluating
    4  polygon is not simple
    5  flow precondition failed (divergence or vorticity not zero)
    6  path-dependence detected during reconstruction
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

import numpy as np

from . import calc2d as c2
from .fieldexpr import DomainError, ParseError
from .hydro import (
    FlowField,
    PathDependenceError,
    PreconditionError,
    area_flux,
    check_cauchy_riemann,
    check_incompressible,
    reconstruct_potential,
    reconstruct_stream_function,
    trace_streamline,
)
from .quadrature import (
    Curve2,
    NonSimplePolygonError,
    QuadratureSpec,
    Rectangle,
    RegionError,
    parse_region,
    verify_gradient_theorem,
    verify_green,
    verify_green_flux,
)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_DOMAIN, EXIT_POLYGON, EXIT_PRECONDITION, EXIT_PATH = range(7)
IDENTITY_TOL = 1e-10
GREEN_TOL = 1e-6

SCALAR_OPS = ("grad", "ham", "laplacian")
VECTOR_OPS = ("curl3", "div", "perp")


class UsageError(Exception):
    pass


def _num(x) -> float | list:
    if isinstance(x, (tuple, list)):
        return [_num(v) for v in x]
    return float(x)


def _report(command: str, inputs: dict, results: dict, residuals: dict, passed: bool, **extra) -> dict:
    out = {"command": command, "inputs": inputs, "results": results, "residuals": residuals, "pass": passed}
    out.update(extra)
    return out


def _random_points(n: int, seed: int, lo: float = -2.0, hi: float = 2.0) -> np.ndarray:
    return np.random.default_rng(seed).uniform(lo, hi, size=(n, 2))


def _spec(args) -> QuadratureSpec:
    try:
        return QuadratureSpec(args.panels, args.order)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _curve(args) -> Curve2:
    parts = args.curve.split(";")
    if len(parts) != 2:
        raise UsageError("--curve takes 'x(t);y(t)'")
    return Curve2.from_text(parts[0], parts[1], args.t0, args.t1)


# --------------------------------------------------------------------------
# Subcommands


def cmd_eval(args) -> tuple[dict, int]:
    at = tuple(args.at)
    if args.op in SCALAR_OPS:
        f = c2.field(args.field)
        if args.op == "grad":
            value = _num(c2.grad2(f)(at))
        elif args.op == "ham":
            value = _num(c2.ham(f)(at))
        else:
            value = float(c2.laplacian(f).value(at))
    else:
        A = c2.VectorField2.parse(args.field)
        if args.op == "curl3":
            value = float(c2.curl3(A).value(at))
        elif args.op == "div":
            value = float(c2.div2(A).value(at))
        else:
            value = _num(c2.perp(A)(at))
    inputs = {"field": args.field, "op": args.op, "at": list(at)}
    return _report("eval", inputs, {"value": value}, {}, True, op=args.op, at=list(at), value=value), EXIT_OK


def identity_residuals(f: c2.ScalarField2, pts: np.ndarray) -> dict[str, float]:
    """Largest deviations of the planar identities over the points ``pts``."""
    P = (pts[:, 0], pts[:, 1])
    shape = pts[:, 0].shape

    def val(s):
        return np.broadcast_to(np.asarray(s.value(P), dtype=float), shape)

    def vec(A):
        return val(A.ax), val(A.ay)

    def mx(*arrays):
        return float(max(np.max(np.abs(a)) for a in arrays)) if len(pts) else 0.0

    lap = val(c2.laplacian(f))
    div_grad = val(c2.div2(c2.grad2(f)))
    curl_ham = val(c2.curl3(c2.ham(f)))
    gx, gy = vec(c2.grad2(f))
    hx, hy = vec(c2.ham(f))
    ppx, ppy = vec(c2.perp(c2.perp(c2.grad2(f))))
    px, py = vec(c2.perp(c2.grad2(f)))
    alpha = c2.d0(f)
    ss = c2.hodge1(c2.hodge1(alpha))
    return {
        "curl3_grad": mx(val(c2.curl3(c2.grad2(f)))),
        "div_ham": mx(val(c2.div2(c2.ham(f)))),
        "laplacian_routes": mx(div_grad - lap, curl_ham - lap, div_grad - curl_ham),
        "perp_perp": mx(ppx + gx, ppy + gy),
        "star_star": mx(val(ss.p) + val(alpha.p), val(ss.q) + val(alpha.q)),
        "perp_grad_ham": mx(px - hx, py - hy),
        "grad_dot_ham": mx(gx * hx + gy * hy),
    }


def cmd_identities(args) -> tuple[dict, int]:
    f = c2.field(args.field)
    pts = _random_points(args.points, args.seed)
    res = identity_residuals(f, pts)
    passed = all(r <= IDENTITY_TOL for r in res.values())
    inputs = {"field": args.field, "points": args.points, "seed": args.seed}
    results = {"tolerance": IDENTITY_TOL, "checks": {k: v <= IDENTITY_TOL for k, v in res.items()}}
    return _report("identities", inputs, results, res, passed), EXIT_OK if passed else EXIT_FAIL


def cmd_green(args) -> tuple[dict, int]:
    A = c2.VectorField2.parse(args.field)
    region = parse_region(args.region)
    q = _spec(args)
    if args.flux:
        rep = verify_green_flux(A, region, q)
    else:
        rep = verify_green(A, region, q)
    passed = rep.residual <= GREEN_TOL
    inputs = {"field": args.field, "region": args.region, "panels": q.panels, "order": q.order, "flux": args.flux}
    return (
        _report("green", inputs, rep.to_dict(), {"residual": rep.residual}, passed),
        EXIT_OK if passed else EXIT_FAIL,
    )


def cmd_gradient_theorem(args) -> tuple[dict, int]:
    f = c2.field(args.field)
    c = _curve(args)
    q = _spec(args)
    rep = verify_gradient_theorem(f, c, q)
    residuals = {"residual": rep.residual, "starred_residual": rep.starred_residual, "twin_gap": rep.twin_gap}
    passed = all(r <= GREEN_TOL for r in residuals.values())
    inputs = {"field": args.field, "curve": args.curve, "t0": args.t0, "t1": args.t1, "panels": q.panels, "order": q.order}
    return _report("gradient-theorem", inputs, rep.to_dict(), residuals, passed), EXIT_OK if passed else EXIT_FAIL


def _flow(args) -> FlowField:
    domain = parse_region(args.domain) if args.domain else None
    return FlowField(c2.VectorField2.parse(args.field), domain, tuple(args.base))


def _grid_csv(fn, a, b, c, d, n) -> str:
    xs = np.linspace(a, b, n)
    ys = np.linspace(c, d, n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    values = np.broadcast_to(fn((X.ravel(), Y.ravel()), 0).v, X.ravel().shape)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "f"])
    for x, y, v in zip(X.ravel(), Y.ravel(), values):
        w.writerow([repr(float(x)), repr(float(y)), repr(float(v))])
    return buf.getvalue()


def _reconstruction(args, which: str) -> tuple[dict | str, int]:
    F = _flow(args)
    build = reconstruct_stream_function if which == "stream" else reconstruct_potential
    fn = build(F, tol=args.tol, q=_spec(args))
    inputs = {"field": args.field, "base": list(F.base_point)}
    if args.grid is not None:
        a, b, c, d, n = args.grid
        n = int(n)
        if n < 1 or n != args.grid[4]:
            raise UsageError("grid size n must be a positive integer")
        return _grid_csv(fn, a, b, c, d, n), EXIT_OK
    at = tuple(args.at)
    value = float(fn.value(at))
    inputs["at"] = list(at)
    return _report(which, inputs, {"value": value}, {}, True, value=value), EXIT_OK


def cmd_stream(args):
    return _reconstruction(args, "stream")


def cmd_potential(args):
    return _reconstruction(args, "potential")


def cmd_trace(args) -> tuple[dict | str, int]:
    v = c2.VectorField2.parse(args.field)
    bounds = Rectangle(*args.bbox) if args.bbox else None
    F = FlowField(v, None, tuple(args.start))
    line = trace_streamline(F, tuple(args.start), args.dt, args.steps, bounds)
    f = None
    if check_incompressible(F).ok:
        try:
            f = reconstruct_stream_function(F)
        except (PreconditionError, PathDependenceError, DomainError):
            f = None
    if args.format == "json":
        results = {
            "points": [list(p) for p in line.points],
            "truncated": line.truncated,
            "reason": line.reason,
            "method": line.method,
        }
        inputs = {"field": args.field, "start": list(args.start), "dt": args.dt, "steps": args.steps}
        return _report("trace", inputs, results, {}, not line.truncated), EXIT_OK
    header = f"# method={line.method} dt={args.dt!r} steps={len(line.points) - 1} truncated={str(line.truncated).lower()}\n"
    return header + line.to_csv(f), EXIT_OK


def cmd_flux(args) -> tuple[dict, int]:
    F = FlowField(c2.VectorField2.parse(args.field))
    c = _curve(args)
    q = _spec(args)
    value = area_flux(F, c, q)
    results = {"flux": value}
    residuals = {}
    F0 = FlowField(F.v, None, c.start)
    if check_incompressible(F0).ok:
        try:
            f = reconstruct_stream_function(F0, q=q)
            diff = float(f.value(c.end)) - float(f.value(c.start))
            results["stream_difference"] = diff
            residuals["flux_vs_stream"] = abs(value - diff)
        except (PreconditionError, PathDependenceError):
            pass
    inputs = {"field": args.field, "curve": args.curve, "t0": args.t0, "t1": args.t1}
    return _report("flux", inputs, results, residuals, True), EXIT_OK


def cmd_cr(args) -> tuple[dict, int]:
    pts = _random_points(args.points, args.seed)
    rep = check_cauchy_riemann(args.stream, args.potential, pts, args.tol)
    inputs = {"stream": args.stream, "potential": args.potential, "points": args.points, "seed": args.seed}
    residuals = {"residual_x": rep.residual_x, "residual_y": rep.residual_y}
    return _report("cr", inputs, rep.to_dict(), residuals, rep.passed), EXIT_OK if rep.passed else EXIT_FAIL


# --------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="veccalc2d", description="Planar vector calculus: operators, identities, integral theorems, flows.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None, help="output format")
    sub = p.add_subparsers(dest="command", required=True)
    add = sub.add_parser

    def add_parser(name, **kw):
        return add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    def quad(sp):
        sp.add_argument("--panels", type=int, default=32)
        sp.add_argument("--order", type=int, default=8)

    def curve(sp):
        sp.add_argument("--curve", required=True, help="'x(t);y(t)'")
        sp.add_argument("--t0", type=float, default=0.0)
        sp.add_argument("--t1", type=float, default=1.0)

    sp = sub.add_parser("eval", help="evaluate an operator at a point")
    sp.add_argument("--field", required=True, help="scalar expression, or 'Ax;Ay' for vector ops")
    sp.add_argument("--op", required=True, choices=SCALAR_OPS + VECTOR_OPS)
    sp.add_argument("--at", type=float, nargs=2, required=True, metavar=("X", "Y"))
    sp.set_defaults(run=cmd_eval)

    sp = sub.add_parser("identities", help="operator identities at random points")
    sp.add_argument("--field", required=True)
    sp.add_argument("--points", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(run=cmd_identities)

    sp = sub.add_parser("green", help="Green's theorem (circulation or flux form)")
    sp.add_argument("--field", required=True, help="'Ax;Ay'")
    sp.add_argument("--region", required=True, nargs="+", help="rect a b c d | disc cx cy r | poly x1 y1 ...")
    sp.add_argument("--flux", action="store_true")
    quad(sp)
    sp.set_defaults(run=cmd_green)

    sp = sub.add_parser("gradient-theorem", help="gradient theorem along a curve")
    sp.add_argument("--field", required=True)
    curve(sp)
    quad(sp)
    sp.set_defaults(run=cmd_gradient_theorem)

    for name, fn, what in (("stream", cmd_stream, "stream function"), ("potential", cmd_potential, "velocity potential")):
        sp = sub.add_parser(name, help=f"reconstruct the {what}")
        sp.add_argument("--field", required=True, help="'vx;vy'")
        sp.add_argument("--base", type=float, nargs=2, default=(0.0, 0.0), metavar=("X0", "Y0"))
        sp.add_argument("--domain", nargs="+", default=None, help="region spec for the precondition checks")
        sp.add_argument("--tol", type=float, default=1e-10, help="divergence or vorticity tolerance")
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--at", type=float, nargs=2, metavar=("X", "Y"))
        g.add_argument("--grid", type=float, nargs=5, metavar=("A", "B", "C", "D", "N"))
        quad(sp)
        sp.set_defaults(run=fn)

    sp = sub.add_parser("trace", help="RK4 streamline")
    sp.add_argument("--field", required=True, help="'vx;vy'")
    sp.add_argument("--start", type=float, nargs=2, required=True, metavar=("X", "Y"))
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument("--bbox", type=float, nargs=4, default=None, metavar=("A", "B", "C", "D"))
    sp.set_defaults(run=cmd_trace)

    sp = sub.add_parser("flux", help="area flux through a path")
    sp.add_argument("--field", required=True, help="'vx;vy'")
    curve(sp)
    quad(sp)
    sp.set_defaults(run=cmd_flux)

    sp = sub.add_parser("cr", help="Cauchy-Riemann check for h = f + i g")
    sp.add_argument("--stream", required=True)
    sp.add_argument("--potential", required=True)
    sp.add_argument("--points", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.set_defaults(run=cmd_cr)
    return p


def _render_text(obj: dict) -> str:
    lines = [f"command: {obj['command']}", f"pass: {obj['pass']}"]
    for section in ("results", "residuals"):
        for k, v in obj[section].items():
            lines.append(f"{section}.{k}: {v}")
    return "\n".join(lines) + "\n"


EXPRESSION_OPTIONS = ("--field", "--stream", "--potential", "--curve")


def _bind_expressions(argv: Sequence[str]) -> list[str]:
    # expressions such as "-y;x" start with '-' and would be read as options
    out, it = [], iter(argv)
    for tok in it:
        if tok in EXPRESSION_OPTIONS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_bind_expressions(sys.argv[1:] if argv is None else argv))
    if args.format is None:
        args.format = "csv" if args.command == "trace" else "json"
    try:
        out, code = args.run(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NonSimplePolygonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_POLYGON
    except (RegionError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except PathDependenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PATH
    if isinstance(out, str):
        sys.stdout.write(out)
    elif args.format == "text":
        sys.stdout.write(_render_text(out))
    else:
        sys.stdout.write(json.dumps(out, allow_nan=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
