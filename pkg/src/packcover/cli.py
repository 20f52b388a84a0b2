"""``packcover`` command line: solve, certify and oracle subcommands.

Reports are JSON on standard output (or ``--output``); errors go to standard
error with exit code 2 for invalid input, 3 for numerical failure and 4 when
the iteration cap is hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

import numpy as np

from . import kernel
from .certify import check_covering, check_primal, duality_sandwich
from .errors import (
    DomainViolation,
    IterationCapExceeded,
    NumericalFailure,
    PackCoverError,
    ParseError,
)
from .formats import parse_instance
from .instance import RawInstance, check_accuracy, prepare, scale, unscale_dual, unscale_primal
from .oracle import exact_opt
from .solver import solve

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_CAP = 4


def _stride(text: str) -> int:
    if text == "off":
        return 0
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"stride must be 'off' or a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("stride must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="packcover", description="Width-independent packing/covering LP solver."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", "-i", required=True, help="instance file (.mtx or .json)")
        p.add_argument("--format", choices=("mtx", "json"), help="default: from the extension")
        p.add_argument("--output", "-o", help="report path (default: standard output)")

    p = sub.add_parser("solve", help="run the solver and certify its output")
    common(p)
    p.add_argument("--eps", type=float, default=0.1, help="accuracy in (0, 0.25] (default 0.1)")
    p.add_argument(
        "--diagnostics", type=_stride, default=0, metavar="STRIDE", help="gap trace stride or 'off'"
    )
    p.add_argument("--debug", action="store_true", help="check analysis invariants every iteration")
    p.add_argument(
        "--backend", choices=("auto", *sorted(kernel.BACKENDS)), default="auto", help="loop kernel"
    )

    p = sub.add_parser("certify", help="certify a given primal/dual pair")
    common(p)
    p.add_argument(
        "--solution",
        help="JSON with 'x' and 'y' in original coordinates (default: keys of a JSON input)",
    )

    p = sub.add_parser("oracle", help="exact optimum by vertex enumeration (tiny instances)")
    common(p)
    return parser


def _floats(v) -> list[float]:
    return [float(t) for t in np.asarray(v).tolist()]


def _certificates(raw: RawInstance, x, y) -> dict:
    p = check_primal(raw, x)
    d = check_covering(raw, y)
    sandwich = list(duality_sandwich(p, d)) if d.min_slack > 0 else None
    return {
        "primal_certificate": asdict(p),
        "dual_certificate": asdict(d),
        "sandwich": sandwich,
    }


def run_solve(args) -> dict:
    eps = check_accuracy(args.eps)
    raw = parse_instance(args.input, args.format)
    inst = prepare(raw, eps)
    rep = solve(
        inst,
        eps,
        diagnostics_stride=args.diagnostics,
        debug=args.debug,
        backend=args.backend,
    )
    smap = inst.scale_map
    x = unscale_primal(rep.x_scaled, smap)
    y = unscale_dual(rep.y_bar_scaled, smap)
    certs = _certificates(raw, x, y)
    params = rep.params
    report = {
        "command": "solve",
        "eps": eps,
        "params": {
            "alpha": params.alpha,
            "eta": params.eta,
            "gamma": params.gamma,
            "a0": params.a0,
            "max_iters": params.max_iters,
            "iteration_bound": params.iteration_bound,
        },
        "iterations": rep.iterations,
        "x": _floats(x),
        "y": _floats(y),
        "primal_objective": certs["primal_certificate"]["objective"],
        "dual_objective": certs["dual_certificate"]["objective"],
        "max_primal_violation": certs["primal_certificate"]["max_violation"],
        "min_dual_slack": certs["dual_certificate"]["min_slack"],
        **certs,
        "scaled": {
            "mu": smap.mu,
            "truncated_entries": len(smap.truncated_entries),
            "primal_objective": rep.primal_objective,
            "dual_objective": rep.dual_objective,
            "max_primal_violation": rep.max_primal_violation,
            "min_dual_slack": rep.min_dual_slack,
        },
        "saturation_events": rep.saturation_events,
    }
    if rep.invariants is not None:
        report["invariants"] = asdict(rep.invariants)
    if rep.trace is not None:
        report["trace"] = [
            {
                "k": r.k,
                "f_value": r.f_value,
                "surrogate_lower": r.surrogate_lower,
                "weighted_gap": r.weighted_gap,
                "min_z": r.min_z,
                "max_step_ratio": r.max_step_ratio,
            }
            for r in rep.trace
        ]
    return report


def _load_solution(args, raw: RawInstance) -> tuple[list, list]:
    path = args.solution or args.input
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid solution JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(data, dict) or "x" not in data or "y" not in data:
        raise ParseError(f"{path}: expected an object with 'x' and 'y'")
    return data["x"], data["y"]


def run_certify(args) -> dict:
    raw = parse_instance(args.input, args.format)
    x, y = _load_solution(args, raw)
    return {"command": "certify", **_certificates(raw, x, y)}


def run_oracle(args) -> dict:
    raw = parse_instance(args.input, args.format)
    inst = scale(raw)
    sol = exact_opt(inst)
    smap = inst.scale_map
    return {
        "command": "oracle",
        "status": sol.status,
        "opt_value": sol.opt_value / smap.mu,
        "x": _floats(unscale_primal(sol.x_star, smap)),
        "y": _floats(unscale_dual(sol.y_star, smap)),
    }


_COMMANDS = {"solve": run_solve, "certify": run_certify, "oracle": run_oracle}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = _COMMANDS[args.command](args)
    except IterationCapExceeded as exc:
        print(f"packcover: iteration cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (NumericalFailure, DomainViolation) as exc:
        print(f"packcover: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (PackCoverError, ValueError, OSError) as exc:
        print(f"packcover: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = json.dumps(report, indent=2, allow_nan=False) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
