"""Command-line front end.

Exit codes: 0 success, 2 solver admissibility failure, 3 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from weno5 import harness
from weno5.errors import AdmissibilityError, ConfigError, NonFiniteError
from weno5.problems import UnknownProblem, catalog_lookup
from weno5.stencil import SchemeConfig, Variant, parse_epsilon

EXIT_OK = 0
EXIT_ADMISSIBILITY = 2
EXIT_CONFIG = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _scheme_args(p: argparse.ArgumentParser, default: str = "ud5") -> None:
    p.add_argument("--scheme", choices=["loc", "js5", "ud5"], default=default)
    p.add_argument("--p", type=float, default=2.0, help="weight exponent (default 2)")
    p.add_argument("--eps", help="fixed:<value> or scaled:<m>; default depends on --scheme")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, help="directory for CSV output")
    p.add_argument("--print-config", action="store_true", help="echo the resolved parameters as JSON and exit")


def _ladder(text: Optional[str]):
    if text is None:
        return None
    return tuple(int(v) for v in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weno5", description="Fifth-order WENO schemes: studies and benchmark runs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("convergence", help="error/order table against an exact solution")
    p.add_argument("problem", nargs="?", default="advect-sine")
    _scheme_args(p)
    p.add_argument("--n", help="comma-separated grid ladder")
    p.add_argument("--dt-const", type=float, help="c in dt = c*dx**(5/4); default gives dt=0.5dx on the coarsest grid")
    p.add_argument("--cfl", type=float, help="use a CFL step instead of the dx**(5/4) rule")
    p.add_argument("--stepper", choices=["rk4", "ssprk3"], default="rk4")
    _common(p)

    p = sub.add_parser("reconstruct-study", help="derivative errors either side of a jump")
    p.add_argument("--n", help="comma-separated grid ladder")
    _common(p)

    p = sub.add_parser("epsilon-sweep", help="one convergence table per epsilon policy")
    p.add_argument("problem", nargs="?", default="advect-sine-cubed")
    _scheme_args(p)
    p.add_argument(
        "--policies", default=",".join(harness.EPSILON_SWEEP_POLICIES),
        help="comma-separated epsilon policies",
    )
    p.add_argument("--n", help="comma-separated grid ladder")
    p.add_argument("--dt-const", type=float)
    _common(p)

    p = sub.add_parser("weights-trace", help="nonlinear weights over the initial data")
    p.add_argument("problem", nargs="?", default="weights-trace")
    _scheme_args(p)
    p.add_argument("--n", type=int)
    _common(p)

    for name, dim in (("run1d", 1), ("run2d", 2)):
        p = sub.add_parser(name, help=f"evolve a {dim}D benchmark to its final time")
        p.add_argument("problem")
        _scheme_args(p)
        p.add_argument("--n", type=int, help="cells per direction")
        p.add_argument("--cfl", type=float, default=0.5)
        p.add_argument("--t-end", type=float, help="override the final time")
        p.add_argument("--stepper", choices=["rk4", "ssprk3"])
        p.add_argument("--single-alpha", action="store_true", help="one splitting speed for all fields")
        if dim == 1:
            p.add_argument("--reference", type=Path, help="reference CSV for shu-osher")
        _common(p)

    p = sub.add_parser("reference", help="build the fine-grid JS5 shu-osher reference")
    p.add_argument("--n", type=int, default=2000)
    _common(p)
    return parser


def _config(args) -> SchemeConfig:
    variant = Variant(args.scheme)
    eps = parse_epsilon(args.eps) if getattr(args, "eps", None) else None
    return SchemeConfig(variant, eps, args.p)


def _resolved(args) -> dict:
    d = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()}
    d.pop("print_config", None)
    if hasattr(args, "scheme"):
        d["scheme_config"] = _config(args).to_dict()
    return d


def _emit_rows(rows, fields, out: Optional[Path], name: str) -> None:
    print(harness.format_table(rows, fields))
    if out is not None:
        path = harness.write_csv(out / f"{name}.csv", fields, (r.as_tuple() for r in rows))
        print(f"wrote {path}")


def _run(args) -> int:
    cmd = args.command
    if cmd == "convergence":
        cfg = _config(args)
        try:
            rows = harness.convergence_study(
                args.problem, cfg, _ladder(args.n), args.stepper, args.dt_const, args.cfl
            )
        except harness.StudyAborted as err:
            _emit_rows(err.rows, harness.ConvergenceRow.FIELDS, args.out, f"convergence_{args.problem}_partial")
            raise err.cause
        _emit_rows(rows, harness.ConvergenceRow.FIELDS, args.out, f"convergence_{args.problem}_{cfg.variant.value}_p{cfg.p:g}")
    elif cmd == "reconstruct-study":
        tables = harness.reconstruct_study(_ladder(args.n) or harness.RECONSTRUCT_LADDER)
        for label, rows in tables.items():
            print(f"# {label}")
            _emit_rows(rows, harness.ReconstructRow.FIELDS, args.out, f"reconstruct_{label}")
    elif cmd == "epsilon-sweep":
        policies = [parse_epsilon(s) for s in args.policies.split(",")]
        tables = harness.epsilon_sweep(
            Variant(args.scheme), policies, args.p, args.problem, _ladder(args.n), args.dt_const
        )
        for label, rows in tables.items():
            print(f"# eps={label}")
            _emit_rows(rows, harness.ConvergenceRow.FIELDS, args.out,
                       f"epsilon_{args.scheme}_{label.replace(':', '-')}")
    elif cmd == "weights-trace":
        cfg = _config(args)
        trace = harness.weights_trace(args.problem, cfg, args.n)
        dev = np.max(np.abs(trace[:, 1:4] - trace[:, 4:]), axis=1)
        print(f"{len(trace)} interfaces, max |w - d| = {dev.max():.3e}, median = {np.median(dev):.3e}")
        if args.out is not None:
            path = harness.write_csv(
                args.out / f"weights_{args.problem}_{cfg.variant.value}_p{cfg.p:g}.csv",
                harness.WEIGHTS_TRACE_FIELDS, trace,
            )
            print(f"wrote {path}")
    elif cmd in ("run1d", "run2d"):
        spec = catalog_lookup(args.problem)
        want = 1 if cmd == "run1d" else 2
        if spec.dim != want:
            raise ConfigError(f"{args.problem!r} is a {spec.dim}D problem; use run{spec.dim}d")
        reference = getattr(args, "reference", None)
        try:
            report, _ = harness.run_benchmark(
                args.problem, _config(args), args.n, args.cfl, args.out, args.stepper,
                args.t_end, args.single_alpha, reference,
            )
        except harness.RunAborted as err:
            print(json.dumps(err.report.to_dict(), indent=2, sort_keys=True))
            raise err.cause
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    elif cmd == "reference":
        _, _, report = harness.build_reference(args.n, args.out)
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.print_config:
            print(json.dumps(_resolved(args), indent=2, sort_keys=True))
            return EXIT_OK
        return _run(args)
    except (AdmissibilityError, NonFiniteError) as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except (ConfigError, UnknownProblem, ValueError) as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
