"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage / parse error,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import expr as ex
from .errors import ArgumentError, NonConvergence, NonFiniteIntegrand
from .example import ExampleParams, RouteError, evaluate_all
from .quad import (
    IntegralResult, QuadratureOptions, Rectangle,
    integrate_diamond_direct, integrate_diamond_rotated, integrate_rectangle,
)
from .specfun import ConvergenceError
from .symmetry import check_invariance, reduce_diamond_to_square, verify_tiling

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, message: str, envelope: dict | None = None, text: str = ""):
        super().__init__(message)
        self.code = code
        self.envelope = envelope
        self.text = text


# --------------------------------------------------------------------------
# argument helpers

def real(text: str) -> float:
    """Real-valued flag; accepts constant expressions such as ``pi`` or ``2*pi``."""
    try:
        return ex.parse_real(text)
    except (ex.ParseError, ex.EvalDomainError) as e:
        raise argparse.ArgumentTypeError(f"invalid real value {text!r}: {e}") from None


def expression(text: str):
    try:
        return ex.parse(text)
    except ex.ParseError as e:
        raise argparse.ArgumentTypeError(f"cannot parse {text!r}: {e}") from None


def _options(args) -> QuadratureOptions:
    try:
        return QuadratureOptions(base_order=args.order, adaptive=not args.no_adaptive,
                                 abs_tol=args.tol, rel_tol=args.rel_tol)
    except ArgumentError as e:
        raise CliError(EXIT_USAGE, str(e)) from None


def _opts_echo(opts: QuadratureOptions) -> dict:
    return {"base_order": opts.base_order, "adaptive": opts.adaptive, "abs_tol": opts.abs_tol,
            "rel_tol": opts.rel_tol, "max_depth": opts.max_depth, "max_panels": opts.max_panels}


def _result_dict(r: IntegralResult) -> dict:
    return {"value": r.value, "error_estimate": r.error_estimate,
            "evaluations": r.evaluations, "method": r.method}


def _warn_unused(e) -> None:
    missing = {"x", "y"} - ex.free_variables(e)
    for name in sorted(missing):
        print(f"warning: integrand does not depend on {name}", file=sys.stderr)


def _envelope(command: str, inputs: dict, results: dict, diagnostics: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "inputs": inputs,
            "results": results, "diagnostics": diagnostics}


def _invariance_dict(rep) -> dict:
    return {"generator_deviations": {"(+L,+L)": rep.generator_deviations[0],
                                     "(+L,-L)": rep.generator_deviations[1]},
            "samples_used": rep.samples_used, "tolerance": rep.tolerance, "seed": rep.seed,
            "pass": rep.passed, "verdict": rep.verdict}


# --------------------------------------------------------------------------
# commands; each returns (exit code, envelope, human-readable text)

def cmd_integrate(args):
    e = args.expr
    _warn_unused(e)
    f = ex.as_integrand(e)
    opts = _options(args)
    inputs = {"expr": ex.to_source(e), "domain": args.domain, "method": args.method}
    diagnostics = {"options": _opts_echo(opts)}
    if args.domain in ("square", "diamond"):
        if args.L is None:
            raise CliError(EXIT_USAGE, f"--L is required for domain {args.domain}")
        if not args.L > 0:
            raise CliError(EXIT_USAGE, "L must be positive")
        inputs["L"] = args.L
    if args.domain == "rect":
        if args.bounds is None:
            raise CliError(EXIT_USAGE, "--bounds x_lo,x_hi,y_lo,y_hi is required for domain rect")
        try:
            bounds = [ex.parse_real(b) for b in args.bounds.split(",")]
            if len(bounds) != 4:
                raise ArgumentError("expected four comma-separated bounds")
            rect = Rectangle(*bounds)
        except (ex.ParseError, ex.EvalDomainError, ArgumentError) as err:
            raise CliError(EXIT_USAGE, f"bad --bounds: {err}") from None
        inputs["bounds"] = bounds
    elif args.domain == "square":
        rect = Rectangle.square(args.L)

    if args.domain != "diamond" and args.method != "direct":
        raise CliError(EXIT_USAGE, f"method {args.method} applies only to --domain diamond")

    text = []
    if args.domain == "diamond" and args.method == "reduced":
        rep = check_invariance(f, args.L, args.samples, args.inv_tol, args.seed)
        diagnostics["invariance"] = _invariance_dict(rep)
        text.append(_invariance_text(rep))
        if not rep.passed and not args.assume_invariant:
            env = _envelope("integrate", inputs, {"refused": True}, diagnostics)
            raise CliError(EXIT_VERIFY, "invariance gate failed; the reduction would be wrong "
                           "(pass --assume-invariant to override)", env, text[0])
        diagnostics["assume_invariant"] = bool(args.assume_invariant)

    try:
        if args.domain != "diamond":
            res = integrate_rectangle(f, rect, opts)
        elif args.method == "direct":
            res = integrate_diamond_direct(f, args.L, opts)
        elif args.method == "rotated":
            res = integrate_diamond_rotated(f, args.L, opts)
        else:
            res = reduce_diamond_to_square(f, args.L, opts)
    except NonConvergence as err:
        diagnostics["result"] = _result_dict(err.result)
        env = _envelope("integrate", inputs, {"converged": False, **_result_dict(err.result)},
                        diagnostics)
        raise CliError(EXIT_NUMERIC, f"non-convergence: {err}", env) from None
    diagnostics["result"] = _result_dict(res)
    results = {"value": res.value, "error_estimate": res.error_estimate,
               "evaluations": res.evaluations}
    text.append(f"value           {res.value!r}\n"
                f"error estimate  {res.error_estimate:.3e}\n"
                f"evaluations     {res.evaluations}\n"
                f"method          {res.method}")
    return EXIT_OK, _envelope("integrate", inputs, results, diagnostics), "\n".join(text)


def _invariance_text(rep) -> str:
    g, h = rep.generator_deviations
    return (f"invariance: {rep.verdict}\n"
            f"  shift (+L,+L) max rel deviation  {g:.3e}\n"
            f"  shift (+L,-L) max rel deviation  {h:.3e}\n"
            f"  samples {rep.samples_used}, tolerance {rep.tolerance:g}, seed {rep.seed}\n"
            f"  (the shifts (-L,-L), (-L,+L) are inverses of these and need no separate test)")


def cmd_invariance(args):
    if not args.L > 0:
        raise CliError(EXIT_USAGE, "L must be positive")
    f = ex.as_integrand(args.expr)
    try:
        rep = check_invariance(f, args.L, args.samples, args.tol, args.seed)
    except ArgumentError as err:
        raise CliError(EXIT_USAGE, str(err)) from None
    inputs = {"expr": ex.to_source(args.expr), "L": args.L, "samples": args.samples,
              "tol": args.tol, "seed": args.seed}
    d = _invariance_dict(rep)
    env = _envelope("invariance", inputs, {"pass": rep.passed,
                                           "generator_deviations": d["generator_deviations"]}, d)
    return (EXIT_OK if rep.passed else EXIT_VERIFY), env, _invariance_text(rep)


def cmd_example(args):
    opts = _options(args)
    try:
        p = ExampleParams(args.A, args.B, args.C, args.D)
    except ValueError as err:
        raise CliError(EXIT_USAGE, str(err)) from None
    inputs = {"A": p.A, "B": p.B, "C": p.C, "D": p.D, "max_dev": args.max_dev}
    try:
        ev = evaluate_all(p, opts)
    except RouteError as err:
        if isinstance(err.cause, (NonConvergence, ConvergenceError)):
            raise CliError(EXIT_NUMERIC, str(err)) from None
        raise
    routes = ev.routes()
    results = {name: r.value for name, r in routes.items()}
    results["max_pairwise_rel_dev"] = ev.max_pairwise_rel_dev
    diagnostics = {"routes": {n: _result_dict(r) for n, r in routes.items()},
                   "max_pairwise_rel_dev": {"value": ev.max_pairwise_rel_dev,
                                            "error_estimate": 0.0},
                   "options": _opts_echo(opts)}
    lines = [f"{'route':<12} {'value':>24} {'error est':>11} {'evals':>8}"]
    for name, r in routes.items():
        lines.append(f"{name:<12} {r.value!r:>24} {r.error_estimate:>11.3e} {r.evaluations:>8}")
    lines.append(f"max pairwise relative deviation: {ev.max_pairwise_rel_dev:.3e}"
                 f" (limit {args.max_dev:g})")
    ok = ev.max_pairwise_rel_dev <= args.max_dev
    if not ok:
        lines.append("FAIL: routes disagree")
    return (EXIT_OK if ok else EXIT_VERIFY), _envelope("example", inputs, results, diagnostics), \
        "\n".join(lines)


def cmd_tiling(args):
    try:
        rep = verify_tiling(args.L, args.grid, args.margin)
    except ArgumentError as err:
        raise CliError(EXIT_USAGE, str(err)) from None
    inputs = {"L": args.L, "grid": args.grid, "margin": args.margin}
    first = [{"x": x, "y": y, "count": c} for x, y, c in rep.violations[:10]]
    results = {"pass": rep.passed, "violations": len(rep.violations), "first_violations": first}
    diagnostics = {"checked_outside_diamond": rep.checked_outside,
                   "checked_inside_diamond": rep.checked_inside,
                   "skipped_near_boundary": rep.skipped}
    lines = [f"tiling L={args.L!r} grid={args.grid} margin={args.margin:g}: "
             f"{'pass' if rep.passed else 'FAIL'}",
             f"  points checked: {rep.checked_outside} outside D, {rep.checked_inside} inside D, "
             f"{rep.skipped} skipped near boundaries",
             f"  violations: {len(rep.violations)}"]
    lines += [f"    ({x!r}, {y!r}) covered {c} times" for x, y, c in rep.violations[:10]]
    return (EXIT_OK if rep.passed else EXIT_VERIFY), _envelope("tiling", inputs, results, diagnostics), \
        "\n".join(lines)


def region_mask(x: np.ndarray, y: np.ndarray, L: float, region: str) -> np.ndarray:
    """Membership in the closed square S, the closed diamond D, or S minus D."""
    in_s = (np.abs(x) <= L) & (np.abs(y) <= L)
    in_d = np.abs(x) + np.abs(y) <= L
    if region == "S":
        return in_s
    if region == "D":
        return in_d
    if region == "SminusD":
        return in_s & ~in_d
    raise ArgumentError(f"unknown region {region!r}")


def write_grid_csv(path: str, x, y, values, inside) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,y,value,in_region\n")
        for a, b, v, m in zip(x.tolist(), y.tolist(), values.tolist(), inside.tolist()):
            fh.write(f"{a!r},{b!r},{v!r},{int(m)}\n")


def cmd_grid(args):
    if not args.L > 0:
        raise CliError(EXIT_USAGE, "L must be positive")
    if args.grid < 2:
        raise CliError(EXIT_USAGE, "grid resolution must be >= 2")
    g = np.linspace(-args.L, args.L, args.grid)
    x, y = (a.ravel() for a in np.meshgrid(g, g, indexing="ij"))
    try:
        values = np.broadcast_to(ex.evaluate(args.expr, x, y), x.shape)
    except ex.EvalDomainError as err:
        raise CliError(EXIT_USAGE, f"integrand not evaluable on the grid: {err}") from None
    inside = region_mask(x, y, args.L, args.region)
    try:
        write_grid_csv(args.out, x, y, values, inside)
    except OSError as err:
        raise CliError(EXIT_USAGE, f"cannot write {args.out}: {err.strerror}") from None
    inputs = {"expr": ex.to_source(args.expr), "L": args.L, "grid": args.grid,
              "region": args.region, "out": args.out}
    results = {"rows": int(x.size), "in_region": int(inside.sum())}
    env = _envelope("grid", inputs, results, {"path": args.out})
    return EXIT_OK, env, f"wrote {x.size} rows ({int(inside.sum())} in region {args.region}) to {args.out}"


def cmd_bench(args):
    if not args.L > 0:
        raise CliError(EXIT_USAGE, "L must be positive")
    f = ex.as_integrand(args.expr)
    try:
        opts = QuadratureOptions(base_order=args.order).with_tol(args.tol)
    except ArgumentError as err:
        raise CliError(EXIT_USAGE, str(err)) from None
    inputs = {"expr": ex.to_source(args.expr), "L": args.L, "tol": args.tol}
    rep = check_invariance(f, args.L, args.samples, args.inv_tol, args.seed)
    diagnostics = {"invariance": _invariance_dict(rep), "options": _opts_echo(opts),
                   "methods": {}}
    if not rep.passed and not args.assume_invariant:
        env = _envelope("bench", inputs, {"refused": True}, diagnostics)
        raise CliError(EXIT_VERIFY, "integrand failed the invariance check; "
                       "bench compares methods that only agree for invariant integrands",
                       env, _invariance_text(rep))
    methods = {"direct": integrate_diamond_direct, "rotated": integrate_diamond_rotated,
               "reduced": reduce_diamond_to_square}
    results, timing = {}, {}
    lines = [f"{'method':<9} {'value':>24} {'error est':>11} {'evals':>9} {'time [s]':>9}  status"]
    for name, fn in methods.items():
        t0 = time.perf_counter()
        try:
            res, converged = fn(f, args.L, opts), True
        except NonConvergence as err:
            res, converged = err.result, False
        timing[name] = time.perf_counter() - t0
        results[name] = {"value": res.value, "evaluations": res.evaluations, "converged": converged}
        diagnostics["methods"][name] = {**_result_dict(res), "converged": converged}
        if not converged:
            diagnostics["methods"][name]["note"] = "NonConvergence: tolerance not reached"
        lines.append(f"{name:<9} {res.value!r:>24} {res.error_estimate:>11.3e} "
                     f"{res.evaluations:>9} {timing[name]:>9.4f}  "
                     f"{'ok' if converged else 'non-converged'}")
    env = _envelope("bench", inputs, results, diagnostics)
    # wall-clock data kept out of the deterministic body
    env["timing"] = {"wall_seconds": timing}
    return EXIT_OK, env, "\n".join(lines)


# --------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--json", action="store_true", help="print the structured JSON envelope")

    quad = argparse.ArgumentParser(add_help=False)
    quad.add_argument("--tol", type=float, default=1e-12, help="absolute tolerance")
    quad.add_argument("--rel-tol", type=float, default=1e-10, help="relative tolerance")
    quad.add_argument("--order", type=int, default=32, help="base Gauss-Legendre order n (pair n/2n)")
    quad.add_argument("--no-adaptive", action="store_true")

    gate = argparse.ArgumentParser(add_help=False)
    gate.add_argument("--samples", type=int, default=256)
    gate.add_argument("--seed", type=int, default=0)
    gate.add_argument("--inv-tol", type=float, default=1e-12, help="invariance tolerance")
    gate.add_argument("--assume-invariant", action="store_true",
                      help="skip the invariance gate's refusal")

    p = argparse.ArgumentParser(prog="diamondquad",
                                description="Diamond/square reduction of 2D integrals.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("integrate", parents=[out, quad, gate], help="integrate an expression")
    s.add_argument("--expr", type=expression, required=True)
    s.add_argument("--domain", choices=["square", "diamond", "rect"], required=True)
    s.add_argument("--L", type=real)
    s.add_argument("--bounds", help="x_lo,x_hi,y_lo,y_hi for --domain rect")
    s.add_argument("--method", choices=["direct", "rotated", "reduced"], default="direct")
    s.set_defaults(func=cmd_integrate)

    s = sub.add_parser("invariance", parents=[out], help="sample the diagonal-shift invariance")
    s.add_argument("--expr", type=expression, required=True)
    s.add_argument("--L", type=real, required=True)
    s.add_argument("--samples", type=int, default=256)
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_invariance)

    s = sub.add_parser("example", parents=[out, quad], help="the four-route Bessel example")
    for name in "ABCD":
        s.add_argument(f"--{name}", type=real, default=0.0)
    s.add_argument("--max-dev", type=float, default=1e-7)
    s.set_defaults(func=cmd_example)

    s = sub.add_parser("tiling", parents=[out], help="check the corner-triangle tiling")
    s.add_argument("--L", type=real, required=True)
    s.add_argument("--grid", type=int, default=256)
    s.add_argument("--margin", type=float, default=1e-6)
    s.set_defaults(func=cmd_tiling)

    s = sub.add_parser("grid", parents=[out], help="dump integrand samples as CSV")
    s.add_argument("--expr", type=expression, required=True)
    s.add_argument("--L", type=real, required=True)
    s.add_argument("--grid", type=int, default=201)
    s.add_argument("--region", choices=["S", "D", "SminusD"], default="S")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_grid)

    s = sub.add_parser("bench", parents=[out, gate], help="compare evaluation counts")
    s.add_argument("--expr", type=expression, required=True)
    s.add_argument("--L", type=real, required=True)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--order", type=int, default=32)
    s.set_defaults(func=cmd_bench)
    return p


def _emit(args, env, text) -> None:
    if args.json:
        print(json.dumps(env, indent=2))
    elif text:
        print(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        code, env, text = args.func(args)
    except CliError as err:
        if err.envelope is not None:
            env = dict(err.envelope, error={"exit_code": err.code, "message": str(err)})
            _emit(args, env, err.text)
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except (ex.EvalDomainError, NonFiniteIntegrand) as err:
        print(f"error: integrand evaluation failed: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (NonConvergence, ConvergenceError) as err:
        print(f"error: non-convergence: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(args, env, text)
    return code


if __name__ == "__main__":
    sys.exit(main())
