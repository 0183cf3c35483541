#!/usr/bin/env python3
"""
Command-line front end: ``mmfbm <command> [options]``.

Commands:
  cov        mmfBm covariance r(t, s), or the mmfOU autocovariance when lambda is set
  sd         spectral density f(x) or f_lam(x); with --x0 the CFS log-integral
  simulate   sample paths as CSV (column t, one column per path)
  pvar       p-variation limit, or a Monte Carlo convergence table with --paths
  estimate   Hölder index, LRD slope or the analytic indices of a mixture
  truncate   truncation of an infinite schedule
  verify     acceptance suite with a pass/fail table
  figures    sample-path data behind the mmfBm and mmfOU figures

Exit codes: 0 success, 1 validation error, 2 numerical failure (including a
failed verify check), 3 I/O error.
"""

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from lib import __version__
from lib.config import Config, configure_logging, reload_config
from lib.constants import Defaults, ExitCodes
from lib.errors import ConvergenceError, MixtureError, ParameterError, require
from lib.estimate import (
    holder_estimate,
    holder_index,
    is_lrd,
    lrd_slope,
    pvar_convergence_study,
    pvar_index,
    pvar_limit,
    write_convergence_csv,
)
from lib.kernels import fgn_autocov, mmfbm_cov, mmfou_autocov
from lib.mixture import (
    MixtureSpec,
    load_schedule,
    load_spec,
    spec_to_document,
    truncate_schedule,
)
from lib.report_io import format_float, to_json, write_columns_csv
from lib.simulate import (
    Method,
    PathGrid,
    Process,
    SimulationSettings,
    reproduce_figures,
    simulate_batch,
)
from lib.spectral import cfs_bound_integral, cfs_integral, mmfbm_sd, mmfou_sd
from lib.suites import SUITES, format_table, run_suite

logger = logging.getLogger(__name__)


def _read_document(source: str, what: str) -> Dict[str, Any]:
    """Parse inline JSON (starting with '{') or the contents of a file."""
    text = source.strip()
    if not text.startswith("{"):
        with open(source) as f:
            text = f.read()
    try:
        return json.loads(text)
    except ValueError as e:
        raise ParameterError(f"{what} is not valid JSON: {e}") from e


def _load_spec(args: argparse.Namespace) -> MixtureSpec:
    require(args.spec is not None, "--spec is required")
    spec = load_spec(_read_document(args.spec, "--spec"))
    if getattr(args, "lam", None) is not None:
        spec = spec.with_lambda(args.lam)
    return spec


def _emit(value: float, digits: int) -> None:
    print(format_float(value, digits))


def _emit_json(document: Dict[str, Any]) -> None:
    print(to_json(document))


# Commands


def cmd_cov(args: argparse.Namespace, config: Config) -> int:
    spec = _load_spec(args)
    require(args.t is not None, "--t is required")
    if spec.lam is not None:
        lag = args.t if args.s is None else args.t - args.s
        value = mmfou_autocov(
            spec,
            spec.lam,
            lag,
            config.quadrature_spec(),
            config.fou_crossover(),
            args.order or config.asymptotic_terms(),
        )
    elif args.delta is not None:
        value = fgn_autocov(spec, args.delta, args.t)
    else:
        value = mmfbm_cov(spec, args.t, args.t if args.s is None else args.s)
    logger.info("Branch: %s", value.branch.value)
    _emit(value.value, args.digits)
    return ExitCodes.OK


def cmd_sd(args: argparse.Namespace, config: Config) -> int:
    spec = _load_spec(args)
    if args.x0 is not None:
        q = config.quadrature_spec()
        _emit_json(
            {
                "x0": args.x0,
                "integral": cfs_integral(spec, spec.lam, args.x0, q),
                "bound": cfs_bound_integral(spec, spec.lam, args.x0),
            }
        )
        return ExitCodes.OK
    require(args.x is not None, "--x or --x0 is required")
    if spec.lam is not None:
        value = mmfou_sd(spec, spec.lam, args.x).value
    else:
        value = mmfbm_sd(spec, args.x).value
    _emit(value, args.digits)
    return ExitCodes.OK


def _process(spec: MixtureSpec) -> Process:
    return Process.MMFBM if spec.lam is None else Process.MMFOU


def _default_method(process: Process, method: Optional[str]) -> Method:
    if method is not None:
        return Method(method)
    return Method.CIRCULANT_SUM if process is Process.MMFBM else Method.DENSE_EXACT


def cmd_simulate(args: argparse.Namespace, config: Config) -> int:
    spec = _load_spec(args)
    process = _process(spec)
    method = _default_method(process, args.method)
    grid = PathGrid(args.horizon, args.grid_n)
    paths = simulate_batch(
        process, spec, grid, args.seed, args.paths, method, spec.lam,
        SimulationSettings.from_config(config),
    )
    columns: Dict[str, Sequence[float]] = {"t": grid.times}
    for i, row in enumerate(paths):
        columns[f"path_{i}"] = row
    if args.out:
        write_columns_csv(Path(args.out), columns, args.digits)
    else:
        print(",".join(columns))
        for j in range(grid.n_points):
            print(",".join(format_float(columns[c][j], args.digits) for c in columns))
    return ExitCodes.OK


def cmd_pvar(args: argparse.Namespace, config: Config) -> int:
    spec = _load_spec(args)
    require(args.p is not None, "--p is required")
    if not args.paths:
        _emit(pvar_limit(spec, args.p, args.horizon), args.digits)
        return ExitCodes.OK

    seeds = [args.seed + i for i in range(args.paths)]
    method = None if args.method is None else Method(args.method)
    rows = pvar_convergence_study(spec, args.p, args.horizon, args.grid_n, seeds, spec.lam, method)
    if args.out:
        write_convergence_csv(rows, Path(args.out), args.digits)
    else:
        print("n,empirical,target,abs_err")
        for r in rows:
            cells = [str(r.n)] + [
                format_float(v, args.digits) for v in (r.empirical, r.target, r.abs_err)
            ]
            print(",".join(cells))
    return ExitCodes.OK


def cmd_estimate(args: argparse.Namespace, config: Config) -> int:
    spec = _load_spec(args)
    if args.estimator == "indices":
        _emit_json(
            {
                "holder_index": holder_index(spec),
                "pvar_index": pvar_index(spec),
                "lrd": is_lrd(spec),
                "spec": spec_to_document(spec),
            }
        )
        return ExitCodes.OK

    if args.estimator == "lrd":
        t_lo, t_hi = args.window
        if spec.lam is None:
            report = lrd_slope(lambda t: fgn_autocov(spec, 1.0, t).value, t_lo, t_hi, 25, spec)
        else:
            report = lrd_slope(
                lambda t: mmfou_autocov(spec, spec.lam, t).value, t_lo, t_hi, 25, spec
            )
        _emit_json(report.to_dict())
        return ExitCodes.OK

    process = _process(spec)
    method = _default_method(process, args.method)
    grid = PathGrid(args.horizon, args.grid_n)
    paths = simulate_batch(
        process, spec, grid, args.seed, args.paths or 200, method, spec.lam,
        SimulationSettings.from_config(config),
    )
    _emit_json(holder_estimate(paths, [1, 2, 4, 8], grid.step, spec).to_dict())
    return ExitCodes.OK


def cmd_truncate(args: argparse.Namespace, config: Config) -> int:
    require(args.schedule is not None, "--schedule is required")
    require(args.eps is not None, "--eps is required")
    family = load_schedule(_read_document(args.schedule, "--schedule"))
    spec, report = truncate_schedule(family, args.eps, args.horizon, args.lam)
    _emit_json(
        {
            "retained": report.retained,
            "tail_bound": report.tail_bound,
            "horizon": report.horizon,
            "eps": report.eps,
            "kind": report.kind,
            "spec": spec_to_document(spec),
        }
    )
    return ExitCodes.OK


def cmd_verify(args: argparse.Namespace, config: Config) -> int:
    results = run_suite(args.suite, args.seed)
    print(format_table(results))
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(
            to_json({"suite": args.suite, "results": [asdict(r) for r in results]}) + "\n"
        )
    return ExitCodes.OK if all(r.passed for r in results) else ExitCodes.CONVERGENCE


def cmd_figures(args: argparse.Namespace, config: Config) -> int:
    require(args.schedule is not None, "--schedule is required (harmonic, factorial, exponential)")
    require(args.out is not None, "--out is required")
    written = reproduce_figures(
        args.schedule, Path(args.out), settings=SimulationSettings.from_config(config),
        digits=args.digits,
    )
    for path in written:
        print(path)
    return ExitCodes.OK


HANDLERS = {
    "cov": cmd_cov,
    "sd": cmd_sd,
    "simulate": cmd_simulate,
    "pvar": cmd_pvar,
    "estimate": cmd_estimate,
    "truncate": cmd_truncate,
    "verify": cmd_verify,
    "figures": cmd_figures,
}


# Parser


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmfbm",
        description="Multi-mixed fractional Brownian motion and Ornstein-Uhlenbeck toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or YAML override file")
    common.add_argument("--verbose", action="store_true", help="Debug logging")
    common.add_argument("--spec", help="Spec document: inline JSON or file path")
    common.add_argument("--lambda", dest="lam", type=float, help="Mean-reversion rate")
    common.add_argument("--seed", type=int, default=Defaults.SEED)
    common.add_argument("--horizon", type=float, default=1.0)
    common.add_argument("--out", help="Output file or directory")

    sub = parser.add_subparsers(dest="command", required=True)

    cov = sub.add_parser("cov", parents=[common], help="Covariance kernels")
    cov.add_argument("--t", type=float)
    cov.add_argument("--s", type=float)
    cov.add_argument("--delta", type=float, help="Increment size for the fGn autocovariance")
    cov.add_argument("--order", type=_positive_int, help="Terms of the large-lag expansion")

    sd = sub.add_parser("sd", parents=[common], help="Spectral densities")
    sd.add_argument("--x", type=float)
    sd.add_argument("--x0", type=float, help="Lower limit of the CFS log-integral")

    simulate = sub.add_parser("simulate", parents=[common], help="Sample paths")
    simulate.add_argument("--grid-n", type=int, default=1000)
    simulate.add_argument("--method", choices=[m.value for m in Method])
    simulate.add_argument("--paths", type=_positive_int, default=1)

    pvar = sub.add_parser("pvar", parents=[common], help="p-variation")
    pvar.add_argument("--p", type=float)
    pvar.add_argument("--grid-n", type=_positive_int, nargs="+", default=[2**10, 2**12, 2**14])
    pvar.add_argument("--method", choices=[m.value for m in Method])
    pvar.add_argument("--paths", type=int, default=0, help="Seeds per n (0: limit only)")

    estimate = sub.add_parser("estimate", parents=[common], help="Index estimators")
    estimate.add_argument("--estimator", choices=["holder", "lrd", "indices"], default="holder")
    estimate.add_argument("--grid-n", type=int, default=1024)
    estimate.add_argument("--method", choices=[m.value for m in Method])
    estimate.add_argument("--paths", type=int, default=200)
    estimate.add_argument("--window", type=float, nargs=2, default=[1e2, 1e4])

    truncate = sub.add_parser("truncate", parents=[common], help="Schedule truncation")
    truncate.add_argument("--schedule", help="Schedule document: inline JSON or file path")
    truncate.add_argument("--eps", type=float)

    verify = sub.add_parser("verify", parents=[common], help="Acceptance suite")
    verify.add_argument("--suite", choices=list(SUITES), default="quick")

    figures = sub.add_parser("figures", parents=[common], help="Figure data")
    figures.add_argument("--schedule", choices=["harmonic", "factorial", "exponential"])

    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, dispatch the command and map errors to exit codes.

    Returns:
        Process exit code
    """
    args = build_parser().parse_args(argv)
    try:
        config = reload_config(Path(args.config) if args.config else None)
    except OSError as e:
        print(f"error: cannot read config: {e}", file=sys.stderr)
        return ExitCodes.IO
    configure_logging(config, args.verbose)
    args.digits = config.significant_digits()

    try:
        return HANDLERS[args.command](args, config)
    except ConvergenceError as e:
        print(f"numerical error: {e}", file=sys.stderr)
        if e.estimate is not None:
            bound = math.nan if e.error_bound is None else e.error_bound
            print(
                f"  best estimate {format_float(e.estimate)} (error bound {format_float(bound)})",
                file=sys.stderr,
            )
        return ExitCodes.CONVERGENCE
    except (MixtureError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCodes.VALIDATION
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return ExitCodes.IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
