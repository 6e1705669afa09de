"""Monte Carlo accuracy studies for the Tracy-Widom approximations.

Every replication draws from its own RNG stream ``(seed, r)``, and all
summaries are order-independent counts or sorts, so reports are
bit-identical for any thread count.

Percentiles of the finite-(n, p) laws are Monte Carlo estimates, not exact
values; relative-error and rate figures therefore carry sampling noise of
the order of the binomial standard error.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .sampler import simulate_extremes
from .scaling import Shape, constants_largest, constants_smallest
from .tw import TwGrid, f1_cdf, f1_quantile, g1_cdf

Target = Literal["largest", "smallest"]
VariantChoice = Literal["new", "old", "both"]

__all__ = [
    "TABLE_LEVELS",
    "LARGEST_ABSCISSAE",
    "SMALLEST_ABSCISSAE",
    "CATEGORIES",
    "CSV_FIELDS",
    "SimConfig",
    "CdfReport",
    "RateReport",
    "standardized_draws",
    "empirical_cdf",
    "empirical_cdfs",
    "table_shapes",
    "table_report",
    "percentile_relative_error",
    "convergence_study",
    "binomial_se",
    "report_rows",
    "rate_rows",
    "write_rows",
]

TABLE_LEVELS = (0.01, 0.05, 0.10, 0.30, 0.50, 0.70, 0.90, 0.95, 0.99)
# F1 percentiles at TABLE_LEVELS
LARGEST_ABSCISSAE = (-3.8954, -3.1804, -2.7824, -1.9104, -1.2686, -0.5923, 0.4501, 0.9793, 2.0234)
# G1 is F1 reflected, so the same probabilities sit at the negated points,
# in the order G1 = 0.99, 0.95, ..., 0.01
SMALLEST_ABSCISSAE = tuple(-s for s in LARGEST_ABSCISSAE)

CATEGORIES = {
    "square": ((2, 2), (5, 5), (25, 25), (100, 100)),
    "rectangular": ((8, 2), (20, 5), (100, 25), (400, 100)),
    "thin": ((500, 5), (1000, 10), (5000, 5), (10000, 10)),
    "smallest": ((4, 2), (10, 5), (50, 25), (200, 100),
                 (8, 2), (20, 5), (100, 25), (400, 100)),
}
CATEGORY_ALIASES = {"rect": "rectangular"}

CSV_FIELDS = ("shape_n", "shape_p", "variant", "target", "reps", "seed",
              "abscissa", "nominal", "empirical", "std_err")
RATE_FIELDS = ("shape_n", "shape_p", "variant", "level", "reps", "seed", "abscissa",
               "empirical", "abs_error", "std_err", "fitted_slope", "status")


@dataclass(frozen=True)
class SimConfig:
    """One simulation setting.

    ``variant`` picks the centering constants for the largest eigenvalue;
    the smallest eigenvalue has a single (log-scale) set and takes "new".
    """

    shape: Shape
    reps: int = 40000
    seed: int = 0
    variant: VariantChoice = "new"
    target: Target = "largest"

    def __post_init__(self):
        if isinstance(self.reps, bool) or int(self.reps) != self.reps or self.reps < 100:
            raise ValueError("reps must be an integer >= 100")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit non-negative integer")
        if self.target not in ("largest", "smallest"):
            raise ValueError(f"unknown target {self.target!r}")
        if self.variant not in ("new", "old", "both"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.target == "smallest":
            if self.shape.n < self.shape.p + 1:
                raise ValueError("the smallest-eigenvalue study needs n >= p + 1")
            if self.variant != "new":
                raise ValueError("the smallest-eigenvalue study has only the 'new' constants")
        if self.variant in ("old", "both") and self.shape.n < 2:
            raise ValueError("classical constants need n >= 2")

    @property
    def variants(self) -> tuple[str, ...]:
        return ("new", "old") if self.variant == "both" else (self.variant,)


def binomial_se(q, reps: int):
    """Binomial standard error sqrt(q (1 - q) / R)."""
    q = np.asarray(q, dtype=float)
    return np.sqrt(q * (1.0 - q) / reps)


@dataclass(frozen=True)
class CdfReport:
    shape: Shape
    reps: int
    seed: int
    variant: str
    target: str
    abscissae: tuple
    nominal: tuple
    empirical: tuple
    std_err: tuple

    def __post_init__(self):
        k = len(self.abscissae)
        if not len(self.nominal) == len(self.empirical) == len(self.std_err) == k:
            raise ValueError("report columns must have equal length")

    def as_dict(self):
        return {
            "shape_n": self.shape.n, "shape_p": self.shape.p, "variant": self.variant,
            "target": self.target, "reps": self.reps, "seed": self.seed,
            "abscissae": list(self.abscissae), "nominal": list(self.nominal),
            "empirical": list(self.empirical), "std_err": list(self.std_err),
        }


@dataclass(frozen=True)
class RateReport:
    shapes: tuple
    quantile_level: float
    abs_errors: tuple
    fitted_slope: float
    variant: str = "new"
    reps: int = 0
    seed: int = 0
    abscissa: float = float("nan")
    empirical: tuple = ()
    std_err: float = float("nan")
    status: str = "noise-limited"
    resolved: tuple = field(default=())

    def non_increasing(self, slack: float = 2.0) -> bool:
        """True if each error is at most the previous one plus ``slack`` SEs."""
        e = self.abs_errors
        return all(e[i + 1] <= e[i] + slack * self.std_err for i in range(len(e) - 1))


def standardized_draws(config: SimConfig, threads: int | None = None,
                       backend: str | None = None) -> dict[str, np.ndarray]:
    """Rescaled Monte Carlo draws, keyed by constants variant.

    Largest: ``(l1 - mu)/sigma``.  Smallest: ``(log lp - nu)/tau``.
    """
    lam_max, lam_min, _ = simulate_extremes(config.shape, config.reps, config.seed,
                                            threads=threads, backend=backend)
    if config.target == "smallest":
        return {"new": constants_smallest(config.shape).standardize(lam_min)}
    return {v: constants_largest(config.shape, v).standardize(lam_max) for v in config.variants}


def _cdf_report(config, variant, z, abscissae, grid):
    x = np.asarray(abscissae, dtype=float)
    limit = g1_cdf if config.target == "smallest" else f1_cdf
    nominal = np.asarray(limit(x, grid), dtype=float)
    zs = np.sort(z)
    empirical = np.searchsorted(zs, x, side="right") / config.reps
    return CdfReport(
        shape=config.shape, reps=config.reps, seed=config.seed, variant=variant,
        target=config.target, abscissae=tuple(float(v) for v in x),
        nominal=tuple(float(v) for v in nominal), empirical=tuple(float(v) for v in empirical),
        std_err=tuple(float(v) for v in binomial_se(nominal, config.reps)),
    )


def _default_abscissae(config):
    return SMALLEST_ABSCISSAE if config.target == "smallest" else LARGEST_ABSCISSAE


def empirical_cdfs(config: SimConfig, abscissae: Sequence[float] | None = None,
                   grid: TwGrid | None = None, threads: int | None = None,
                   backend: str | None = None) -> list[CdfReport]:
    """One `CdfReport` per variant in ``config``, all from the same draws."""
    if abscissae is None:
        abscissae = _default_abscissae(config)
    draws = standardized_draws(config, threads, backend)
    return [_cdf_report(config, v, draws[v], abscissae, grid) for v in config.variants]


def empirical_cdf(config: SimConfig, abscissae: Sequence[float] | None = None,
                  grid: TwGrid | None = None, threads: int | None = None,
                  backend: str | None = None) -> CdfReport:
    """Fraction of rescaled draws at or below each abscissa.

    Parameters
    ----------
    config : SimConfig
        Must name a single variant.
    abscissae : sequence of float, optional
        Evaluation points on the limit-law scale.  Defaults to the F1
        percentiles at `TABLE_LEVELS` for the largest eigenvalue, and to
        their negatives (the matching G1 points) for the smallest.
    """
    if config.variant == "both":
        raise ValueError("empirical_cdf needs a single variant; use empirical_cdfs")
    return empirical_cdfs(config, abscissae, grid, threads, backend)[0]


def table_shapes(category: str) -> tuple:
    key = CATEGORY_ALIASES.get(category, category)
    if key not in CATEGORIES:
        raise ValueError(f"unknown category {category!r}; choose from {sorted(CATEGORIES)}")
    return tuple(Shape(n, p) for n, p in CATEGORIES[key])


def table_report(category: str, reps: int = 40000, seed: int = 0, grid: TwGrid | None = None,
                 threads: int | None = None) -> list[CdfReport]:
    """Reports for every shape of a category; both variants for the largest eigenvalue."""
    smallest = CATEGORY_ALIASES.get(category, category) == "smallest"
    reports = []
    for shape in table_shapes(category):
        config = SimConfig(shape, reps, seed, variant="new" if smallest else "both",
                           target="smallest" if smallest else "largest")
        reports.extend(empirical_cdfs(config, grid=grid, threads=threads))
    return reports


def percentile_relative_error(shape: Shape, level: float, reps: int = 40000, seed: int = 0,
                              grid: TwGrid | None = None, variant: str = "new",
                              threads: int | None = None) -> float:
    """Relative error ``theta_TW / theta - 1`` of the F1 percentile.

    ``theta`` is the Monte Carlo ``level``-quantile of the rescaled largest
    eigenvalue (Hazen plotting positions, ``(i + 1/2)/R``) and ``theta_TW``
    the F1 quantile at the same level.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    z = standardized_draws(SimConfig(shape, reps, seed, variant=variant), threads)[variant]
    theta = float(np.quantile(z, level, method="hazen"))
    return f1_quantile(level, grid) / theta - 1.0


def convergence_study(shapes: Sequence[Shape], level: float = 0.05, reps: int = 40000,
                      seed: int = 0, grid: TwGrid | None = None, variant: str = "new",
                      threads: int | None = None) -> RateReport:
    """Distributional error at one F1 percentile along a family of shapes.

    For each shape the error is ``|P(rescaled l1 <= s) - level|`` with
    ``s = f1_quantile(level)``.  The slope is fitted by least squares to
    ``log max(error, SE)`` against ``log min(n, p)``.

    The fit is labelled "noise-limited" unless at least two errors exceed
    2 SE; otherwise "rate-consistent" if the slope is negative and
    "not-converging" if it is not.
    """
    shapes = tuple(shapes)
    if len(shapes) < 3:
        raise ValueError("convergence_study needs at least three shapes")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    sizes = [min(s.n, s.p) for s in shapes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("shapes must have strictly increasing min(n, p)")
    n0, p0 = shapes[0].n, shapes[0].p
    if any(s.n * p0 != n0 * s.p for s in shapes):
        raise ValueError("shapes must share one aspect ratio n/p")

    s_level = f1_quantile(level, grid)
    se = float(binomial_se(level, reps))
    empirical, errors = [], []
    for shape in shapes:
        z = standardized_draws(SimConfig(shape, reps, seed, variant=variant), threads)[variant]
        f = float(np.count_nonzero(z <= s_level)) / reps
        empirical.append(f)
        errors.append(abs(f - level))
    floored = np.maximum(errors, se)
    slope = float(np.polyfit(np.log(sizes), np.log(floored), 1)[0])
    resolved = tuple(e > 2.0 * se for e in errors)
    if sum(resolved) < 2:
        status = "noise-limited"
    else:
        status = "rate-consistent" if slope < 0 else "not-converging"
    return RateReport(
        shapes=shapes, quantile_level=float(level), abs_errors=tuple(errors),
        fitted_slope=slope, variant=variant, reps=reps, seed=seed, abscissa=float(s_level),
        empirical=tuple(empirical), std_err=se, status=status, resolved=resolved,
    )


# ---------------------------------------------------------------------------
# serialisation

def report_rows(reports: Sequence[CdfReport]) -> list[dict]:
    """Flatten reports into rows with the `CSV_FIELDS` columns."""
    rows = []
    for r in reports:
        for i, a in enumerate(r.abscissae):
            rows.append({
                "shape_n": r.shape.n, "shape_p": r.shape.p, "variant": r.variant,
                "target": r.target, "reps": r.reps, "seed": r.seed, "abscissa": a,
                "nominal": r.nominal[i], "empirical": r.empirical[i], "std_err": r.std_err[i],
            })
    return rows


def rate_rows(report: RateReport) -> list[dict]:
    rows = []
    for shape, emp, err in zip(report.shapes, report.empirical, report.abs_errors):
        rows.append({
            "shape_n": shape.n, "shape_p": shape.p, "variant": report.variant,
            "level": report.quantile_level, "reps": report.reps, "seed": report.seed,
            "abscissa": report.abscissa, "empirical": emp, "abs_error": err,
            "std_err": report.std_err, "fitted_slope": report.fitted_slope,
            "status": report.status,
        })
    return rows


def _cell(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def write_rows(rows: Sequence[dict], fmt: str = "csv", fields: Sequence[str] | None = None) -> str:
    """Render rows as CSV or JSON text; floats keep full precision in both."""
    if fields is None:
        fields = list(rows[0]) if rows else list(CSV_FIELDS)
    if fmt == "json":
        return json.dumps([{k: row[k] for k in fields} for row in rows], indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown output format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_cell(row[k]) for k in fields])
    return buf.getvalue()
