"""Command-line interface.

Exit codes: 0 success, 2 invalid input / not convex / contract violation,
3 shrink exhausted, 4 I/O error, 5 infeasible bridge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .bridge import (
    EndpointData,
    edge_ramped_density,
    epsilon_bound,
    feasibility,
    glue,
    hermite_bridge,
    triangle_bump,
)
from .errors import (
    BudgetTooTight,
    C2ConvexError,
    ContractViolation,
    GlueInfeasible,
    Infeasible,
    NotContinuous,
    NotConvex,
    ShrinkExhausted,
)
from .oracle import OracleConfig, sample_checks
from .piecewise import PiecewiseFn, check_convex
from .pipeline import ToleranceConfig, approximate, approximate_graded, verify

EXIT_OK, EXIT_INPUT, EXIT_SHRINK, EXIT_IO, EXIT_INFEASIBLE = 0, 2, 3, 4, 5

FLAT_MIDDLE = PiecewiseFn.from_global([-1.0, 0.0, 1.0, 2.0], [[0, 0, 1], [0], [1, -2, 1]])


class CliError(Exception):
    def __init__(self, msg, code):
        super().__init__(msg)
        self.code = code


def _check_readable(*paths):
    for p in paths:
        if p is not None and not os.path.isfile(p):
            raise CliError(f"cannot read {p}", EXIT_IO)


def _check_writable(*paths):
    for p in paths:
        if p is None:
            continue
        d = os.path.dirname(os.path.abspath(p))
        if not os.path.isdir(d) or not os.access(d, os.W_OK):
            raise CliError(f"cannot write {p}", EXIT_IO)


def load_fn(path: str) -> PiecewiseFn:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"{path}: {exc}", EXIT_IO) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON ({exc})", EXIT_INPUT) from exc
    try:
        return PiecewiseFn.from_dict(data)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from exc


def store_json(obj: dict, path: str):
    try:
        with open(path, "w") as fh:
            json.dump(obj, fh, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise CliError(f"{path}: {exc}", EXIT_IO) from exc


def _floats3(text: str):
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected v,s,k got {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three numbers, got {text!r}")
    return parts


def _profile(spec: str | None):
    if spec is None:
        return None
    kind, _, val = spec.partition(":")
    if kind == "const":
        try:
            return float(val)
        except ValueError:
            raise CliError(f"bad profile {spec!r}", EXIT_INPUT) from None
    if kind == "file":
        _check_readable(val)
        return load_fn(val)
    raise CliError(f"profile must be const:V or file:path, got {spec!r}", EXIT_INPUT)


def plot_rows(f: PiecewiseFn, g: PiecewiseFn, n: int = 2000):
    a, b = f.domain
    xs = np.unique(np.concatenate((np.linspace(a, b, n), f.breakpoints, g.breakpoints)))
    return xs, f(xs), g(xs), f(xs, 2), g(xs, 2)


def write_csv(path: str | None, header, rows):
    buf = io.StringIO() if path is None else None
    try:
        fh = buf if path is None else open(path, "w", newline="")
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
        if path is not None:
            fh.close()
    except OSError as exc:
        raise CliError(f"{path}: {exc}", EXIT_IO) from exc
    if buf is not None:
        sys.stdout.write(buf.getvalue())


# ---------------------------------------------------------------------------
# subcommands


def run_approximate(args) -> int:
    _check_readable(args.input)
    _check_writable(args.output, args.report, args.plot)
    f_raw = load_fn(args.input)
    f = check_convex(f_raw)
    cfg = ToleranceConfig(args.measure_budget, _profile(args.profile))
    if args.graded:
        g, report = approximate_graded(f, cfg, args.graded)
    else:
        g, report = approximate(f, cfg)
    out_fn = f_raw if g.fn.same_as(f.fn) else g.fn
    store_json(out_fn.to_dict(), args.output)
    store_json(report.to_dict(), args.report)
    if args.plot:
        xs, fx, gx, fpp, gpp = plot_rows(f.fn, g.fn, args.plot_points)
        write_csv(args.plot, ["x", "f", "g", "fpp", "gpp"], zip(xs, fx, gx, fpp, gpp))
    print(f"ok: {len(report.intervals)} correction intervals, disagreement {report.disagreement!r}")
    return EXIT_OK


def run_verify(args) -> int:
    _check_readable(args.f, args.g)
    _check_writable(args.report)
    f = check_convex(load_fn(args.f))
    g = load_fn(args.g)
    cfg = None
    if args.measure_budget is not None or args.profile is not None:
        prof = _profile(args.profile) if args.profile else float("inf")
        budget = float("inf") if args.measure_budget is None else args.measure_budget
        cfg = ToleranceConfig(budget, prof)
    if args.deep:
        s = sample_checks(f.fn, g, f.domain, OracleConfig.from_env())
        if s.convexity_violations:
            print(
                f"NotConvexOutput: {s.convexity_violations} midpoint-convexity violations on the grid",
                file=sys.stderr,
            )
            return EXIT_INPUT
    try:
        report = verify(f, g, cfg)
    except ContractViolation as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = report.to_dict()
    if args.deep:
        out["deep"] = {
            "convexity_violations": s.convexity_violations,
            "grid_sup": s.grid_sup,
            "grid_sup_ok": s.grid_sup <= report.sup_error_global * (1 + 1e-9) + 1e-12,
            "mc_measure": s.mc_measure,
            "mc_covers": bool(s.covers(report.disagreement)),
        }
        if not (out["deep"]["grid_sup_ok"] and out["deep"]["mc_covers"]):
            print("deep check disagrees with exact verification", file=sys.stderr)
            print(json.dumps(out, indent=1))
            return EXIT_INPUT
    if args.report:
        store_json(out, args.report)
    print(json.dumps(out, indent=1))
    return EXIT_OK


def run_bridge(args) -> int:
    c = args.c
    left = EndpointData(0.0, *args.left)
    right = EndpointData(c, *args.right)
    feas = feasibility(c, left, right)
    if not feas.ok:
        print(str(feas))
        print(f"infeasible: {feas.reason.value}", file=sys.stderr)
        return EXIT_INFEASIBLE
    b = hermite_bridge(left, right)
    if args.json:
        print(
            json.dumps(
                {
                    "feasibility": str(feas),
                    "kind": b.kind.value,
                    "density": b.density.to_dict(),
                    "fn": b.fn.to_dict(),
                },
                indent=1,
            )
        )
    else:
        print(str(feas))
        print(f"kind: {b.kind.value}")
        print("density nodes: " + " ".join(f"({t:.6g}, {h:.6g})" for t, h in b.density.nodes))
        for x0, x1, cf in zip(b.fn.breakpoints[:-1], b.fn.breakpoints[1:], b.fn.segments):
            print(f"[{x0:.6g}, {x1:.6g}]: " + " ".join(f"{v:.12g}" for v in cf))
    return EXIT_OK


def run_bump(args) -> int:
    if args.A or args.B:
        w = args.w if args.w is not None else args.c / 4
        d = edge_ramped_density(args.c, args.A, args.B, args.P, args.tau, w)
    else:
        d = triangle_bump(args.c, args.P, args.tau)
    out = d.to_dict()
    out["eps"] = epsilon_bound(d)
    print(json.dumps(out, indent=1))
    return EXIT_OK


def run_glue(args) -> int:
    _check_readable(args.input)
    _check_writable(args.output)
    f = check_convex(load_fn(args.input))
    g = glue(f, args.beta, args.gamma, args.eps)
    store_json(g.fn.to_dict(), args.output)
    print("equality case: f returned unchanged" if g is f else "strict case: bridge inserted")
    return EXIT_OK


def figure1_rows(c: float = 2.0, height: float = 1.2, offset: float = 0.3):
    """Node data for both triangle orientations (peak near 0 and near c)."""
    rows = []
    for case, tau in (("tau_le_half", offset), ("tau_ge_half", c - offset)):
        P = height * min(tau, c - tau)
        for t, h in triangle_bump(c, P, tau).nodes:
            rows.append((case, t, h))
    return rows


def figure2_rows(n: int = 401, alpha: float = -1.0, beta: float = -0.2, gamma: float = 1.0):
    """Squeeze region for ``f = 0.3 (x^4 + x^2 + x)`` agreeing at three points."""
    f = PiecewiseFn.from_global([alpha, gamma], [[0.0, 0.3, 0.3, 0.0, 0.3]])
    fa, fb, fg = f.eval(alpha), f.eval(beta), f.eval(gamma)
    chord = lambda x: fg + (fg - fa) / (gamma - alpha) * (x - gamma)  # noqa: E731
    right_line = lambda x: fg + (fg - fb) / (gamma - beta) * (x - gamma)  # noqa: E731
    left_line = lambda x: fb + (fb - fa) / (beta - alpha) * (x - beta)  # noqa: E731
    xs = np.unique(np.concatenate((np.linspace(alpha, gamma, n), [beta])))
    lower = np.where(xs <= beta, right_line(xs), left_line(xs))
    return zip(xs, f(xs), lower, chord(xs))


def run_demo(args) -> int:
    name = args.name
    if name == "figure1":
        write_csv(args.plot, ["case", "t", "h"], figure1_rows())
        return EXIT_OK
    if name == "figure2":
        write_csv(args.plot, ["x", "f", "lower", "upper"], figure2_rows())
        return EXIT_OK
    fixtures = {
        "paper-example": (FLAT_MIDDLE, 0.2, 0.05),
        "abs": (PiecewiseFn.from_global([-1.0, 0.0, 1.0], [[0, -1], [0, 1]]), 0.1, 0.05),
    }
    if name not in fixtures:
        raise CliError(f"unknown demo {name!r}; choose from figure1, figure2, {', '.join(fixtures)}", EXIT_INPUT)
    _check_writable(args.plot, args.output, args.report)
    fn, budget, prof = fixtures[name]
    f = check_convex(fn)
    g, report = approximate(f, ToleranceConfig(budget, prof))
    if args.output:
        store_json(g.fn.to_dict(), args.output)
    if args.report:
        store_json(report.to_dict(), args.report)
    if args.plot:
        xs, fx, gx, fpp, gpp = plot_rows(f.fn, g.fn)
        write_csv(args.plot, ["x", "f", "g", "fpp", "gpp"], zip(xs, fx, gx, fpp, gpp))
    print(json.dumps(report.to_dict(), indent=1))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="c2convex", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("approximate", help="convex C2 Lusin approximation of a JSON function")
    a.add_argument("--input", required=True)
    a.add_argument("--measure-budget", type=float, required=True)
    a.add_argument("--profile", required=True, help="const:V or file:profile.json")
    a.add_argument("--graded", type=int, default=0, metavar="N")
    a.add_argument("--output", required=True)
    a.add_argument("--report", required=True)
    a.add_argument("--plot", default=None)
    a.add_argument("--plot-points", type=int, default=2000)
    a.set_defaults(run=run_approximate)

    v = sub.add_parser("verify", help="check the output contracts of g against f")
    v.add_argument("--f", required=True)
    v.add_argument("--g", required=True)
    v.add_argument("--deep", action="store_true", help="also run the sampling oracle")
    v.add_argument("--measure-budget", type=float, default=None)
    v.add_argument("--profile", default=None)
    v.add_argument("--report", default=None)
    v.set_defaults(run=run_verify)

    b = sub.add_parser("bridge", help="feasibility and Hermite bridge for endpoint data")
    b.add_argument("--c", type=float, required=True)
    b.add_argument("--left", type=_floats3, required=True, metavar="v,s,k")
    b.add_argument("--right", type=_floats3, required=True, metavar="v,s,k")
    b.add_argument("--json", action="store_true")
    b.set_defaults(run=run_bridge)

    d = sub.add_parser("bump", help="triangle or edge-ramped density")
    d.add_argument("--c", type=float, required=True)
    d.add_argument("--P", type=float, required=True)
    d.add_argument("--tau", type=float, required=True)
    d.add_argument("--A", type=float, default=0.0)
    d.add_argument("--B", type=float, default=0.0)
    d.add_argument("--w", type=float, default=None)
    d.set_defaults(run=run_bump)

    gl = sub.add_parser("glue", help="C2 convex gluing across [beta - eps, gamma + eps]")
    gl.add_argument("--input", required=True)
    gl.add_argument("--beta", type=float, required=True)
    gl.add_argument("--gamma", type=float, required=True)
    gl.add_argument("--eps", type=float, required=True)
    gl.add_argument("--output", required=True)
    gl.set_defaults(run=run_glue)

    m = sub.add_parser("demo", help="built-in fixtures: paper-example, abs, figure1, figure2")
    m.add_argument("name")
    m.add_argument("--plot", default=None)
    m.add_argument("--output", default=None)
    m.add_argument("--report", default=None)
    m.set_defaults(run=run_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (NotConvex, NotContinuous) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ShrinkExhausted, BudgetTooTight) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SHRINK
    except (Infeasible, GlueInfeasible) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ContractViolation as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (C2ConvexError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
