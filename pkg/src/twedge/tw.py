"""The orthogonal Tracy-Widom law F1 and its reflection G1.

F1 is evaluated as the Fredholm determinant det(I - K_s) of the kernel
K_s(x, y) = Ai((x + y)/2)/2 on L^2(s, inf), discretised by Nystrom's method
on a Gauss-Legendre rule pulled back through a rational map of (-1, 1) onto
(s, inf).  Day-to-day evaluation goes through a precomputed `TwGrid` and a
monotone cubic Hermite interpolant.
"""
from __future__ import annotations

import csv
import logging
import os
import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .specfun import airy_ai, det_batch, gauss_legendre_rule

log = logging.getLogger(__name__)

__all__ = [
    "GridConfig",
    "TwGrid",
    "f1_fredholm",
    "f1_fredholm_many",
    "build_grid",
    "load_grid",
    "save_grid",
    "export_csv",
    "default_grid",
    "cache_dir",
    "f1_cdf",
    "g1_cdf",
    "f1_pdf",
    "f1_quantile",
]

MAP_SCALE = 10.0
S_RANGE = (-12.0, 10.0)
ORDER_RANGE = (8, 512)
MONOTONE_CLIP = 1e-12
_BATCH = 48

CACHE_MAGIC = b"TWEDGEF1"
CACHE_VERSION = 1
_HEADER = struct.Struct("<8sIdddIQ")


def _check_order(quad_order):
    lo, hi = ORDER_RANGE
    if not isinstance(quad_order, (int, np.integer)) or not lo <= quad_order <= hi:
        raise ValueError(f"quad_order must be an integer in [{lo}, {hi}], got {quad_order!r}")


def f1_fredholm_many(s, quad_order=64, map_scale=MAP_SCALE):
    """Vectorised `f1_fredholm` over an array of abscissae."""
    _check_order(quad_order)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    lo, hi = S_RANGE
    if not np.all(np.isfinite(s)) or np.any(s < lo) or np.any(s > hi):
        raise ValueError(f"s must lie in [{lo}, {hi}]")
    rule = gauss_legendre_rule(int(quad_order))
    xi, w = rule.nodes, rule.weights
    r = (1.0 + xi) / (1.0 - xi)
    root_w = np.sqrt(w * 2.0 * map_scale / (1.0 - xi) ** 2)
    pair = 0.5 * map_scale * (r[:, None] + r[None, :])
    weight = 0.5 * root_w[:, None] * root_w[None, :]
    eye = np.eye(len(xi))

    out = np.empty(len(s))
    for start in range(0, len(s), _BATCH):
        chunk = s[start:start + _BATCH]
        # (x_i + x_j)/2 = s + L (r_i + r_j)/2
        kernel = airy_ai(chunk[:, None, None] + pair[None, :, :]) * weight
        out[start:start + _BATCH] = det_batch(eye - kernel)
    return np.clip(out, 0.0, 1.0)


def f1_fredholm(s: float, quad_order: int = 64, map_scale: float = MAP_SCALE) -> float:
    """F1(s) directly from the Nystrom-discretised Fredholm determinant.

    Parameters
    ----------
    s : float
        Abscissa in [-12, 10].
    quad_order : int
        Number of Gauss-Legendre nodes, in [8, 512].
    map_scale : float
        Scale L of the map x = s + L (1 + xi)/(1 - xi).
    """
    return float(f1_fredholm_many([s], quad_order, map_scale)[0])


@dataclass(frozen=True)
class GridConfig:
    s_min: float = -10.0
    s_max: float = 8.0
    step: float = 0.02
    quad_order: int = 64

    def __post_init__(self):
        if not self.s_min < self.s_max:
            raise ValueError("grid: s_min must be below s_max")
        if not self.step > 0:
            raise ValueError("grid: step must be positive")
        _check_order(self.quad_order)

    @property
    def size(self):
        return int(round((self.s_max - self.s_min) / self.step)) + 1


@dataclass(frozen=True, eq=False)
class TwGrid:
    """F1 sampled on a uniform grid; immutable once built."""

    s_min: float
    s_max: float
    step: float
    quad_order: int
    cdf_values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.cdf_values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "cdf_values", values)
        if len(values) != int(round((self.s_max - self.s_min) / self.step)) + 1:
            raise ValueError("grid: value count does not match bounds and step")

    @property
    def config(self):
        return GridConfig(self.s_min, self.s_max, self.step, self.quad_order)

    @cached_property
    def abscissae(self):
        return np.linspace(self.s_min, self.s_max, len(self.cdf_values))

    @cached_property
    def slopes(self):
        return _monotone_slopes(self.cdf_values, self.step)


def _monotone_slopes(y, h):
    """Fourth-order finite-difference slopes, limited to keep the Hermite
    interpolant monotone (Fritsch-Carlson)."""
    n = len(y)
    d = np.empty(n)
    if n >= 5:
        d[2:-2] = (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)
        d[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / (12 * h)
        d[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) / (12 * h)
        d[-1] = (25 * y[-1] - 48 * y[-2] + 36 * y[-3] - 16 * y[-4] + 3 * y[-5]) / (12 * h)
        d[-2] = (3 * y[-1] + 10 * y[-2] - 18 * y[-3] + 6 * y[-4] - y[-5]) / (12 * h)
    else:
        d[:] = np.gradient(y, h)
    d = np.maximum(d, 0.0)

    delta = np.diff(y) / h
    for k in range(n - 1):
        if delta[k] == 0.0:
            d[k] = d[k + 1] = 0.0
            continue
        a, b = d[k] / delta[k], d[k + 1] / delta[k]
        r2 = a * a + b * b
        if r2 > 9.0:
            t = 3.0 / np.sqrt(r2)
            d[k] = t * a * delta[k]
            d[k + 1] = t * b * delta[k]
    d.setflags(write=False)
    return d


def build_grid(config: GridConfig | None = None) -> TwGrid:
    """Evaluate F1 on every grid point and enforce monotonicity.

    Round-off violations of monotonicity smaller than 1e-12 are clipped;
    anything larger is a numerical failure and raises ``ArithmeticError``.
    """
    config = config or GridConfig()
    s = np.linspace(config.s_min, config.s_max, config.size)
    values = f1_fredholm_many(s, config.quad_order)
    drops = values[:-1] - values[1:]
    if np.any(drops > MONOTONE_CLIP):
        worst = int(np.argmax(drops))
        raise ArithmeticError(
            f"F1 grid not monotone near s={s[worst]:.4f} (drop {drops[worst]:.3e})"
        )
    values = np.maximum.accumulate(values)
    return TwGrid(config.s_min, config.s_max, config.step, config.quad_order, values)


def save_grid(grid: TwGrid, path) -> None:
    values = np.ascontiguousarray(grid.cdf_values, dtype="<f8")
    header = _HEADER.pack(
        CACHE_MAGIC, CACHE_VERSION, grid.s_min, grid.s_max, grid.step,
        grid.quad_order, len(values),
    )
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_bytes(header + values.tobytes())
    os.replace(tmp, path)


def load_grid(path) -> TwGrid:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError(f"{path}: truncated grid cache")
    magic, version, s_min, s_max, step, order, count = _HEADER.unpack_from(data)
    if magic != CACHE_MAGIC:
        raise ValueError(f"{path}: not a twedge grid cache")
    if version != CACHE_VERSION:
        raise ValueError(f"{path}: unsupported grid cache version {version}")
    body = data[_HEADER.size:]
    if len(body) != 8 * count:
        raise ValueError(f"{path}: expected {count} values, found {len(body) // 8}")
    values = np.frombuffer(body, dtype="<f8").astype(float)
    return TwGrid(s_min, s_max, step, order, values)


def export_csv(grid: TwGrid, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "F1"])
        for s, v in zip(grid.abscissae, grid.cdf_values):
            writer.writerow([repr(float(s)), repr(float(v))])


def cache_dir() -> Path:
    env = os.environ.get("TWEDGE_CACHE_DIR")
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "twedge"


def _cache_name(config: GridConfig):
    return (
        f"f1_v{CACHE_VERSION}_{config.s_min:g}_{config.s_max:g}_"
        f"{config.step:g}_{config.quad_order}.bin"
    )


_memo: dict = {}


def default_grid(config: GridConfig | None = None, rebuild: bool = False) -> TwGrid:
    """Return the grid for ``config``, loading the on-disk cache when present."""
    config = config or GridConfig()
    path = cache_dir() / _cache_name(config)
    key = (config, str(path))
    if not rebuild and key in _memo:
        return _memo[key]
    grid = None
    if not rebuild and path.exists():
        try:
            grid = load_grid(path)
        except (OSError, ValueError) as exc:
            log.warning("ignoring unreadable grid cache %s: %s", path, exc)
    if grid is None:
        grid = build_grid(config)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            save_grid(grid, path)
        except OSError as exc:
            log.warning("could not write grid cache %s: %s", path, exc)
    _memo[key] = grid
    return grid


def _resolve(grid):
    return default_grid() if grid is None else grid


def _hermite(grid, s, derivative=False):
    s = np.asarray(s, dtype=float)
    y, d, h = grid.cdf_values, grid.slopes, grid.step
    n = len(y)
    pos = (s - grid.s_min) / h
    k = np.clip(np.floor(pos).astype(np.int64), 0, n - 2)
    t = np.clip(pos - k, 0.0, 1.0)
    y0, y1 = y[k], y[k + 1]
    m0, m1 = d[k] * h, d[k + 1] * h
    if derivative:
        t2 = t * t
        val = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0
               + (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / h
        return np.maximum(val, 0.0)
    t2 = t * t
    t3 = t2 * t
    val = ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0
           + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1)
    return np.clip(val, 0.0, 1.0)


def _scalar_or_array(x, like):
    return float(x) if np.ndim(like) == 0 else x


def f1_cdf(s, grid: TwGrid | None = None):
    """F1(s) by monotone cubic interpolation; 0 below and 1 above the grid."""
    grid = _resolve(grid)
    sa = np.asarray(s, dtype=float)
    out = _hermite(grid, sa)
    out = np.where(sa < grid.s_min, 0.0, np.where(sa > grid.s_max, 1.0, out))
    return _scalar_or_array(out, s)


def g1_cdf(s, grid: TwGrid | None = None):
    """Reflected law G1(s) = 1 - F1(-s)."""
    return 1.0 - f1_cdf(-np.asarray(s, dtype=float), grid)


def f1_pdf(s, grid: TwGrid | None = None):
    """Density of F1: derivative of the interpolant, zero off the grid."""
    grid = _resolve(grid)
    sa = np.asarray(s, dtype=float)
    out = _hermite(grid, sa, derivative=True)
    out = np.where((sa < grid.s_min) | (sa > grid.s_max), 0.0, out)
    return _scalar_or_array(out, s)


QUANTILE_RANGE = (1e-8, 1.0 - 1e-8)


def f1_quantile(q, grid: TwGrid | None = None):
    """Inverse of `f1_cdf` for ``q`` in [1e-8, 1 - 1e-8].

    The bracketing grid cell is located by search, the cubic is inverted by
    safeguarded Newton steps (at most five), and bisection finishes any
    cell where Newton has not met ``|F1(s) - q| <= 1e-7``.
    """
    grid = _resolve(grid)
    qa = np.atleast_1d(np.asarray(q, dtype=float))
    lo_q, hi_q = QUANTILE_RANGE
    if not np.all(np.isfinite(qa)) or np.any(qa < lo_q) or np.any(qa > hi_q):
        raise ValueError(f"quantile level must lie in [{lo_q}, {hi_q}]")
    y = grid.cdf_values
    if np.any(qa > y[-1]) or np.any(qa < y[0]):
        raise ValueError("quantile level outside the range covered by the grid")
    k = np.clip(np.searchsorted(y, qa, side="left") - 1, 0, len(y) - 2)
    a = grid.abscissae[k].copy()
    b = grid.abscissae[k + 1].copy()
    ya, yb = y[k], y[k + 1]
    span = np.where(yb > ya, yb - ya, 1.0)
    x = a + (qa - ya) / span * (b - a)
    for _ in range(5):
        f = _hermite(grid, x) - qa
        a = np.where(f < 0, x, a)
        b = np.where(f > 0, x, b)
        dens = _hermite(grid, x, derivative=True)
        step = np.where(dens > 0, f / np.where(dens > 0, dens, 1.0), 0.0)
        nxt = x - step
        x = np.where((nxt > a) & (nxt < b), nxt, 0.5 * (a + b))
    for _ in range(60):
        f = _hermite(grid, x) - qa
        if np.all(np.abs(f) <= 1e-9):
            break
        a = np.where(f < 0, x, a)
        b = np.where(f > 0, x, b)
        x = np.where(np.abs(f) <= 1e-9, x, 0.5 * (a + b))
    return _scalar_or_array(x if np.ndim(q) else x[0], q)
