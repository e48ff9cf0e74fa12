"""Command-line interface for batch spectral experiments.

Subcommands:
    spectrum    solve configured methods on one mesh, write CSV + summary
    converge    first-eigenvalue convergence study over a mesh sequence
    table ID    recompute a target table and report per-cell pass/fail
    reference   generate the fine-mesh reference spectrum file

A JSON config (--config) supplies the run description; individual flags
override config fields. Exit codes: 0 success, 1 table cell failure,
2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .assembly import ConfigError
from .benchmarks import TABLE_IDS
from .eigensolve import NotPositiveDefiniteError, NumericalFailureError
from .experiments import (
    ExperimentConfig,
    generate_reference,
    load_config,
    reproduce_table,
    run_convergence,
    run_spectrum,
    validate_config,
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON experiment config file")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--p", type=int, help="polynomial degree")
    parser.add_argument("--n", help="element count, or comma list for converge")
    parser.add_argument("--method", action="append",
                        help="method name (repeatable): fem, softfem, gsfem, "
                             "softfembq, gsfembq")
    parser.add_argument("--eta-k", type=float, help="stiffness softness")
    parser.add_argument("--eta-m", type=float, help="mass softness")
    parser.add_argument("--alpha", type=float, help="quadrature blending weight")
    parser.add_argument("--params", choices=["t2", "t4"], help="parameter preset")
    parser.add_argument("--problem", choices=["laplace1d", "laplace2d", "variable_kappa"])
    parser.add_argument("--format", choices=["csv", "json"], help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="softfem",
        description="Spectral benchmarks for soft finite element methods")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("spectrum", help="single-mesh spectrum run"))
    _add_common(sub.add_parser("converge", help="mesh-refinement study"))
    table = sub.add_parser("table", help="reproduce a target table")
    table.add_argument("table_id", choices=TABLE_IDS)
    table.add_argument("--out", default=".", help="output/report directory")
    table.add_argument("--reference", help="existing reference spectrum file")
    table.add_argument("--no-generate-reference", action="store_true",
                       help="fail instead of generating a missing reference")
    ref = sub.add_parser("reference", help="generate a reference spectrum")
    ref.add_argument("--problem", default="variable_kappa",
                     choices=["variable_kappa", "laplace1d"])
    ref.add_argument("--out", default=".", help="output directory")
    ref.add_argument("--p", type=int, default=4, help="polynomial degree")
    ref.add_argument("--n", type=int, default=1000, help="element count")
    return parser


def _parse_n(raw: str):
    parts = [int(v) for v in str(raw).split(",") if v != ""]
    if not parts:
        raise ConfigError(f"cannot parse element count {raw!r}")
    return parts[0] if len(parts) == 1 else parts


def _config_from_args(args) -> ExperimentConfig:
    if args.config:
        config = load_config(args.config)
    else:
        config = ExperimentConfig()
    if args.problem:
        config.problem = args.problem
    if args.p is not None:
        config.degree = args.p
    if args.n is not None:
        config.n_elements = _parse_n(args.n)
    if args.out is not None:
        config.out_dir = args.out
    if args.format is not None:
        config.format = args.format
    if args.params is not None:
        config.params = args.params
    if args.method:
        spec = {}
        if args.eta_k is not None:
            spec["eta_k"] = args.eta_k
        if args.eta_m is not None:
            spec["eta_m"] = args.eta_m
        if args.alpha is not None:
            spec["alpha"] = args.alpha
        config.methods = [dict(spec, method=m) for m in args.method]
    # re-validate the merged description
    raw = {
        "problem": config.problem, "degree": config.degree,
        "n_elements": config.n_elements, "methods": config.methods,
        "params": config.params, "out_dir": config.out_dir,
        "format": config.format, "tolerances": config.tolerances,
        "quad_increment": config.quad_increment,
    }
    if config.n_elements_y is not None:
        raw["n_elements_y"] = config.n_elements_y
    if config.kappa is not None:
        raw["kappa"] = config.kappa
        raw["kappa_value"] = config.kappa_value
    if config.reference is not None:
        raw["reference"] = config.reference
    return validate_config(raw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "spectrum":
            summary = run_spectrum(_config_from_args(args))
            for path in summary.get("files", []):
                print(path)
            return 0
        if args.command == "converge":
            result = run_convergence(_config_from_args(args))
            for label, order in result.get("orders", {}).items():
                print(f"{label}: order {order:.3f}")
            for path in result.get("files", []):
                print(path)
            return 0
        if args.command == "table":
            report = reproduce_table(
                args.table_id, out_dir=args.out, reference=args.reference,
                generate_reference_if_missing=not args.no_generate_reference,
                write_report=True)
            for line in report.lines():
                print(line)
            return 0 if report.passed else 1
        if args.command == "reference":
            ref, path = generate_reference(args.problem, args.out,
                                           degree=args.p, n_elements=args.n)
            print(f"{path} (first eigenvalue {ref.eigenvalues[0]:.6f})")
            return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NotPositiveDefiniteError, NumericalFailureError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    raise AssertionError("unreachable command")


if __name__ == "__main__":
    sys.exit(main())
