"""Command-line interface: ``twedge <subcommand> [options]``.

Exit codes: 0 success, 1 usage or invalid input, 2 numerical failure,
3 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import _backend
from .sampler import resolve_threads, simulate_extremes
from .scaling import (
    Shape,
    constants_largest,
    constants_smallest,
    pvalue_largest,
    pvalue_smallest,
    spiked_sequence,
)
from .tw import default_grid, f1_cdf, f1_pdf, f1_quantile, g1_cdf

log = logging.getLogger("twedge")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a non-negative 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", type=Path, default=None,
                        help="output file, or directory to write <subcommand>.<format> into")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--threads", type=int, default=0,
                        help="worker threads; 0 uses TWEDGE_THREADS or all CPUs")
    common.add_argument("--rebuild-cache", action="store_true",
                        help="recompute the F1 grid instead of loading the cache")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="twedge", description="Tracy-Widom approximations for extreme "
                     "Wishart eigenvalues, with a Monte Carlo accuracy harness.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("tw-cdf", parents=[common], help="F1 (and G1) distribution function")
    p.add_argument("--s", type=float, nargs="+", required=True)

    p = sub.add_parser("tw-quantile", parents=[common], help="F1 quantiles")
    p.add_argument("--q", type=float, nargs="+", required=True)

    p = sub.add_parser("tw-grid", parents=[common], help="dump the F1 grid with its density")

    p = sub.add_parser("pvalue-largest", parents=[common],
                       help="upper-tail p-value of a largest eigenvalue")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, nargs="+", required=True)
    p.add_argument("--variant", choices=("new", "old"), default="new")
    p.add_argument("--estimate-scale", action="store_true",
                   help="replace the unit noise level by trace/(n p)")
    p.add_argument("--trace", type=float, default=None,
                   help="trace of the Wishart matrix, needed with --estimate-scale")

    p = sub.add_parser("pvalue-smallest", parents=[common],
                       help="lower-tail p-value of a smallest eigenvalue")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, nargs="+", required=True)

    p = sub.add_parser("constants", parents=[common], help="centering and scaling constants")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--variant", choices=("new", "old", "smallest"), default="new")

    p = sub.add_parser("simulate", parents=[common],
                       help="empirical CDF of rescaled extreme eigenvalues")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--reps", type=int, default=40000)
    p.add_argument("--target", choices=("largest", "smallest"), default="largest")
    p.add_argument("--variant", choices=("new", "old", "both"), default=None,
                   help="default: both for largest, new for smallest")
    p.add_argument("--abscissae", type=_float_list, default=None)
    p.add_argument("--draws", action="store_true",
                   help="emit the raw eigenvalue draws instead of the CDF report")

    p = sub.add_parser("table", parents=[common], help="reproduce an accuracy table block")
    p.add_argument("--category", choices=("square", "rect", "rectangular", "thin", "smallest"),
                   required=True)
    p.add_argument("--reps", type=int, default=40000)

    p = sub.add_parser("rate", parents=[common], help="error decay along a fixed aspect ratio")
    p.add_argument("--ratio", type=int, default=4, help="n/p")
    p.add_argument("--levels", type=_float_list, default=[0.05])
    p.add_argument("--sizes", type=_int_list, default=[2, 5, 25, 100], help="values of p")
    p.add_argument("--reps", type=int, default=40000)
    p.add_argument("--variant", choices=("new", "old"), default="new")

    p = sub.add_parser("spike-test", parents=[common], help="nested tests for the number of spikes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eigs", type=Path, required=True, help="one-column CSV of eigenvalues")
    p.add_argument("--kmax", type=int, default=None)
    return parser


# ---------------------------------------------------------------------------
# subcommands; each returns (rows, fields)

def _grid(args):
    return default_grid(rebuild=args.rebuild_cache)


def cmd_tw_cdf(args):
    grid = _grid(args)
    rows = [{"s": s, "F1": f1_cdf(s, grid), "G1": g1_cdf(s, grid)} for s in args.s]
    return rows, ("s", "F1", "G1")


def cmd_tw_quantile(args):
    grid = _grid(args)
    rows = [{"q": q, "s": f1_quantile(q, grid)} for q in args.q]
    return rows, ("q", "s")


def cmd_tw_grid(args):
    grid = _grid(args)
    s = grid.abscissae
    pdf = f1_pdf(s, grid)
    rows = [{"s": float(a), "F1": float(b), "pdf": float(c)}
            for a, b, c in zip(s, grid.cdf_values, pdf)]
    return rows, ("s", "F1", "pdf")


def cmd_pvalue_largest(args):
    shape = Shape(args.n, args.p)
    if args.trace is not None and not args.estimate_scale:
        raise UsageError("--trace is only used with --estimate-scale")
    if args.estimate_scale and args.trace is None:
        raise UsageError("--estimate-scale needs --trace")
    grid = _grid(args)
    scale = constants_largest(shape, args.variant)
    factor = shape.n * shape.p / args.trace if args.estimate_scale else 1.0
    rows = []
    for lam in args.lam:
        pv = pvalue_largest(lam, shape, grid, args.estimate_scale, args.trace, args.variant)
        rows.append({"n": shape.n, "p": shape.p, "variant": args.variant, "lambda": lam,
                     "statistic": float(scale.standardize(lam * factor)), "pvalue": pv})
    return rows, ("n", "p", "variant", "lambda", "statistic", "pvalue")


def cmd_pvalue_smallest(args):
    shape = Shape(args.n, args.p)
    grid = _grid(args)
    scale = constants_smallest(shape)
    rows = []
    for lam in args.lam:
        pv = pvalue_smallest(lam, shape, grid)
        rows.append({"n": shape.n, "p": shape.p, "lambda": lam,
                     "statistic": float(scale.standardize(lam)), "pvalue": pv})
    return rows, ("n", "p", "lambda", "statistic", "pvalue")


def cmd_constants(args):
    shape = Shape(args.n, args.p)
    if args.variant == "smallest":
        c = constants_smallest(shape)
        row = {"n": shape.n, "p": shape.p, "variant": "smallest", "mu_minus": c.mu_minus,
               "sigma_minus": c.sigma_minus, "tau": c.tau, "nu": c.nu}
        return [row], tuple(row)
    c = constants_largest(shape, args.variant)
    row = {"n": shape.n, "p": shape.p, "variant": args.variant, "mu": c.mu, "sigma": c.sigma}
    return [row], tuple(row)


def cmd_simulate(args):
    shape = Shape(args.n, args.p)
    if args.draws:
        lam_max, lam_min, _ = simulate_extremes(shape, args.reps, args.seed, threads=args.threads)
        rows = [{"stream": i, "lambda_max": float(a), "lambda_min": float(b)}
                for i, (a, b) in enumerate(zip(lam_max, lam_min))]
        return rows, ("stream", "lambda_max", "lambda_min")
    variant = args.variant or ("new" if args.target == "smallest" else "both")
    config = ex.SimConfig(shape, args.reps, args.seed, variant=variant, target=args.target)
    reports = ex.empirical_cdfs(config, args.abscissae, _grid(args), threads=args.threads)
    return ex.report_rows(reports), ex.CSV_FIELDS


def cmd_table(args):
    reports = ex.table_report(args.category, args.reps, args.seed, _grid(args), threads=args.threads)
    return ex.report_rows(reports), ex.CSV_FIELDS


def cmd_rate(args):
    if args.ratio < 1:
        raise UsageError("--ratio must be at least 1")
    grid = _grid(args)
    shapes = [Shape(args.ratio * p, p) for p in args.sizes]
    rows = []
    for level in args.levels:
        report = ex.convergence_study(shapes, level, args.reps, args.seed, grid,
                                      variant=args.variant, threads=args.threads)
        rows.extend(ex.rate_rows(report))
    return rows, ex.RATE_FIELDS


def read_eigenvalues(path: Path) -> np.ndarray:
    """One-column CSV of eigenvalues; a non-numeric first line is a header."""
    values = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            cells = [c.strip() for c in row if c.strip()]
            if not cells:
                continue
            if len(cells) != 1:
                raise UsageError(f"{path}:{lineno}: expected one column, got {len(cells)}")
            try:
                values.append(float(cells[0]))
            except ValueError:
                if values or lineno > 1:
                    raise UsageError(f"{path}:{lineno}: not a number: {cells[0]!r}")
    eigs = np.asarray(values, dtype=float)
    if np.any(np.diff(eigs) > 0):
        log.warning("eigenvalues in %s were not in descending order; sorting them", path)
        eigs = np.sort(eigs)[::-1]
    return eigs


def cmd_spike_test(args):
    eigs = read_eigenvalues(args.eigs)
    results = spiked_sequence(eigs, args.n, args.kmax, _grid(args))
    rows = [{"k": r.k, "tau_sq_hat": r.tau_sq_hat, "statistic": r.statistic, "pvalue": r.pvalue}
            for r in results]
    return rows, ("k", "tau_sq_hat", "statistic", "pvalue")


COMMANDS = {
    "tw-cdf": cmd_tw_cdf,
    "tw-quantile": cmd_tw_quantile,
    "tw-grid": cmd_tw_grid,
    "pvalue-largest": cmd_pvalue_largest,
    "pvalue-smallest": cmd_pvalue_smallest,
    "constants": cmd_constants,
    "simulate": cmd_simulate,
    "table": cmd_table,
    "rate": cmd_rate,
    "spike-test": cmd_spike_test,
}


def _emit(text, args):
    if args.output is None:
        sys.stdout.write(text)
        return
    path = args.output
    if path.is_dir() or str(path).endswith(("/", "\\")):
        path.mkdir(parents=True, exist_ok=True)
        path = path / f"{args.command}.{args.output_format}"
    path.write_text(text)
    log.info("wrote %s", path)


def _check_finite(rows):
    for row in rows:
        for v in row.values():
            if isinstance(v, float) and not math.isfinite(v):
                raise ArithmeticError(f"non-finite result in {row}")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    if args.threads < 0:
        print("twedge: error: --threads must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    args.threads = resolve_threads(args.threads)
    log.info("kernels: %s, threads: %d", _backend.NAME, args.threads)
    try:
        rows, fields = COMMANDS[args.command](args)
        _check_finite(rows)
        text = ex.write_rows(rows, args.output_format, fields)
        _emit(text, args)
    except UsageError as exc:
        print(f"twedge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"twedge: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"twedge: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"twedge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    sys.exit(run())
