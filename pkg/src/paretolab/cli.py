"""Batch command line: ``paretolab <subcommand> [options]``.

Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .closed_form import SWEEPABLE, exponent_sweep, pareto_exponent
from .dirichlet import ClassMix, characteristic_value, common_step, find_roots, find_tail_root
from .estimators import hill_plateau, loglog_slope
from .exceptions import OutOfRange, ParetoLabError, StationarityUnavailable
from .experiments import confiscation_experiment, equivalence_check
from .log_grid import (DEFAULT_M, ConvergenceTrace, GridDistribution, GridOperator, GridSpec,
                       iterate_with_source, pareto_fixed_point, residual)
from .montecarlo import run_mc
from .params import validate_params


def _params(args):
    params = validate_params(args.p, args.gamma, args.kappa)
    if params.warning:
        print(f"warning: {params.warning}", file=sys.stderr)
    return params


def _add_params(parser, kappa_default=1.0):
    parser.add_argument("--p", type=float, required=True, help="win probability")
    parser.add_argument("--gamma", type=float, required=True, help="wagered fraction")
    parser.add_argument("--kappa", type=float, default=kappa_default,
                        help="dissipative coefficient (default %(default)s)")


def _add_grid(parser, x_max=1e6):
    parser.add_argument("--m", type=int, default=DEFAULT_M, help="cells per log(1+gamma)")
    parser.add_argument("--x-min", type=float, default=1.0)
    parser.add_argument("--x-max", type=float, default=x_max)


def cmd_exponent(args) -> int:
    report = pareto_exponent(_params(args))
    doc = report.as_dict()
    if args.json:
        sys.stdout.write(io.dumps_json(doc))
    else:
        width = max(map(len, doc))
        for key, value in doc.items():
            print(f"{key:<{width}}  {io.fmt(value)}")
    return 0


def cmd_sweep(args) -> int:
    table = exponent_sweep(_params(args), args.which, args.start, args.stop, args.steps)
    io.write_text(args.out, io.sweep_csv(table))
    return 0


def cmd_solve(args) -> int:
    params = _params(args)
    modulation = None
    if args.modulation:
        modulation = [float(v) for v in args.modulation.split(",")]
    spec = GridSpec(args.m, args.x_min, args.x_max)
    g = pareto_fixed_point(params, spec, modulation, args.scale, args.branch)
    io.write_text(args.out, io.grid_csv(g))
    doc = {
        "residual": residual(g, params),
        "alpha": pareto_exponent(params).alpha,
        "cells": g.size,
        "branch": args.branch,
    }
    if args.branch == "sound":
        doc["loglog_alpha"] = loglog_slope(g).alpha_hat
    target = args.json_out if args.out not in (None, "-") else sys.stderr
    if target is sys.stderr:
        sys.stderr.write(io.dumps_json(doc))
    else:
        io.write_text(target, io.dumps_json(doc))
    return 0


def cmd_stability(args) -> int:
    params = _params(args)
    spec = None
    if args.x_max is not None:
        spec = GridSpec(args.m, args.x_min, args.x_max)
    x_c = args.xc if args.xc == "auto" else float(args.xc)
    report = confiscation_experiment(params, spec, x_c, args.steps,
                                     diagnostic=args.diagnostic)
    io.write_text(args.out, io.dumps_json(report.as_dict()))
    if args.csv:
        io.write_text(args.csv, io.trace_csv(ConvergenceTrace(report.distances)))
    return 0


def cmd_mc(args) -> int:
    if args.config:
        model = ClassMix.from_dict(io.read_json(args.config))
    else:
        if args.p is None or args.gamma is None:
            raise OutOfRange("mc needs --p and --gamma, or --config")
        model = _params(args)
    if model.kappa <= 1.0 and not args.no_tail:
        raise StationarityUnavailable("stationary tail unavailable at kappa=1")
    result = run_mc(model, args.agents, args.steps, args.burn_in, args.seed,
                    args.reinject_at, args.hill_k, estimate_tail=not args.no_tail,
                    workers=args.threads)
    if args.samples:
        io.write_text(args.samples, io.samples_csv(result.samples))
    doc = result.as_dict()
    if result.tail is not None:
        n = result.samples.size
        ks = sorted({k for k in (n // 400, n // 200, n // 100, n // 50) if 2 <= k < n})
        doc["hill_plateau"] = [e.as_dict() for e in hill_plateau(result.samples, ks)]
    io.write_text(args.out, io.dumps_json(doc))
    return 0


def cmd_multiclass(args) -> int:
    mix = ClassMix.from_dict(io.read_json(args.config))
    rho0, alpha = find_tail_root(mix)
    doc = {
        "kappa": mix.kappa,
        "classes": mix.to_dict()["classes"],
        "rho0": rho0,
        "alpha": alpha,
        "certificate": abs(characteristic_value(mix, rho0) - 1.0),
        "roots": list(find_roots(mix)),
    }
    aligned = common_step(mix, args.m)
    doc["commensurate"] = aligned is not None
    if args.grid_steps:
        if aligned is None:
            raise OutOfRange("class gammas are incommensurate; grid iteration refused "
                             "(the root above and the mc subcommand still apply)")
        op = GridOperator.from_mix(mix, args.m)
        bump = GridDistribution(0, args.m, op.lam, np.hanning(args.m + 2)[1:-1])
        g = iterate_with_source(bump, op, args.grid_steps)
        start = -g.base_index + 10 * args.m
        est = loglog_slope(g, (start, start + 4 * args.m))
        doc["grid_alpha"] = est.alpha_hat
        doc["grid_steps"] = args.grid_steps
    io.write_text(args.out, io.dumps_json(doc))
    return 0


def cmd_equivalence(args) -> int:
    report = equivalence_check(_params(args), args.x0)
    io.write_text(args.out, io.dumps_json(report.as_dict()))
    return 0 if report.agree else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paretolab",
        description="Invariant Pareto laws of a dissipative multiplicative wealth model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponent", help="characteristic roots and Pareto exponent")
    _add_params(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("sweep", help="alpha along one parameter (CSV value,alpha)")
    _add_params(p)
    p.add_argument("--which", choices=SWEEPABLE, required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("solve", help="invariant density on the log grid (CSV x,f)")
    _add_params(p)
    _add_grid(p)
    p.add_argument("--modulation", help="m comma-separated positive periodic factors")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--branch", choices=("sound", "growing"), default="sound")
    p.add_argument("--out", default="-")
    p.add_argument("--json-out", default="-", help="residual report (JSON)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("stability", help="confiscation experiment (JSON report)")
    _add_params(p)
    p.add_argument("--m", type=int, default=DEFAULT_M)
    p.add_argument("--x-min", type=float, default=1.0)
    p.add_argument("--x-max", type=float, default=None,
                   help="default: large enough that the truncated tail is negligible")
    p.add_argument("--xc", default="auto")
    p.add_argument("--steps", type=int, default=40)
    p.add_argument("--diagnostic", action="store_true", help="allow kappa = 1")
    p.add_argument("--out", default="-")
    p.add_argument("--csv", help="per-step distances (CSV step,distance,ratio)")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("mc", help="agent simulation and Hill tail estimate")
    p.add_argument("--p", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--kappa", type=float, default=1.2)
    p.add_argument("--config", help="class-mix JSON instead of --p/--gamma/--kappa")
    p.add_argument("--agents", type=int, default=200_000)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--burn-in", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reinject-at", type=float, default=1.0)
    p.add_argument("--hill-k", type=int, default=None)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $PARETOLAB_THREADS); results do not depend on it")
    p.add_argument("--no-tail", action="store_true", help="skip tail estimation")
    p.add_argument("--samples", help="final wealths (CSV wealth)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("multiclass", help="tail exponent of a class mix (JSON)")
    p.add_argument("--config", required=True)
    p.add_argument("--m", type=int, default=DEFAULT_M)
    p.add_argument("--grid-steps", type=int, default=0,
                   help="also iterate a reinjected bump on the grid for this many steps")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_multiclass)

    p = sub.add_parser("equivalence", help="summability / alpha > 1 / kappa > 1 check")
    _add_params(p)
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_equivalence)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParetoLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
