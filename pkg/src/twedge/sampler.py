"""Extreme eigenvalues of W_p(I, n) from the bidiagonal Laguerre model.

If B is p x p lower bidiagonal with independent entries

    B[i, i]   ~ chi_{n - i},      i = 0 .. p-1
    B[i+1, i] ~ chi_{p - 1 - i},  i = 0 .. p-2

then B B^T is symmetric tridiagonal and its eigenvalues have the joint law
of the eigenvalues of a white Wishart matrix W_p(I, n).  The extremes are
found by Sturm-count bisection, O(p) per count, so one replication costs
O(p) random draws and O(p log(1/tol)) flops instead of the O(n p^2) of a
dense Wishart matrix.

B B^T is formed explicitly (rather than working with singular values of B);
that is safe while the smallest eigenvalue stays well away from zero
relative to the largest, which holds for n/p >= 2.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import _backend
from .rng import RngStream, sample_chi
from .scaling import Shape

__all__ = [
    "RngStream",
    "Tridiagonal",
    "ExtremePair",
    "sample_chi",
    "sample_bidiagonal",
    "sturm_count",
    "extreme_eigenvalue",
    "sample_extremes",
    "simulate_extremes",
    "resolve_threads",
    "DEFAULT_REL_TOL",
]

DEFAULT_REL_TOL = 1e-12
CHUNK = 4096


@dataclass(frozen=True, eq=False)
class Tridiagonal:
    """Symmetric tridiagonal matrix stored as its diagonal and off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.ascontiguousarray(self.diag, dtype=float)
        e = np.ascontiguousarray(self.offdiag, dtype=float)
        if d.ndim != 1 or len(d) < 1 or e.shape != (len(d) - 1,):
            raise ValueError("Tridiagonal needs p >= 1 diagonal and p - 1 off-diagonal entries")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def p(self):
        return len(self.diag)

    def dense(self):
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


@dataclass(frozen=True)
class ExtremePair:
    lambda_max: float
    lambda_min: float
    degenerate: bool = False


def sample_bidiagonal(shape: Shape, rng: RngStream) -> Tridiagonal:
    """Draw B B^T for the bidiagonal model of W_p(I, n); requires n >= p."""
    n, p = shape.n, shape.p
    if n < p:
        raise ValueError("sample_bidiagonal needs n >= p; use the dual shape (p, n)")
    diag = np.empty(p)
    off = np.empty(p - 1)
    prev_sub = 0.0
    for i in range(p):
        b_ii = sample_chi(n - i, rng)
        diag[i] = b_ii * b_ii + prev_sub * prev_sub
        if i < p - 1:
            prev_sub = sample_chi(p - 1 - i, rng)
            off[i] = prev_sub * b_ii
    return Tridiagonal(diag, off)


def sturm_count(T: Tridiagonal, x: float) -> int:
    """Number of eigenvalues of ``T`` strictly below ``x``."""
    return int(_backend.kernels.sturm_count(T.diag, T.offdiag, float(x)))


def extreme_eigenvalue(
    T: Tridiagonal,
    which: Literal["largest", "smallest"] = "largest",
    rel_tol: float = DEFAULT_REL_TOL,
) -> float:
    """Largest or smallest eigenvalue of ``T`` by Sturm bisection.

    Bisection starts from the Gershgorin interval and stops once the
    bracket is narrower than ``rel_tol * max(1, |midpoint|)``.
    """
    if which not in ("largest", "smallest"):
        raise ValueError("which must be 'largest' or 'smallest'")
    if not rel_tol >= 1e-14:
        raise ValueError("rel_tol must be at least 1e-14")
    return float(_backend.kernels.extreme_eigenvalue(T.diag, T.offdiag, which == "largest", rel_tol))


def sample_extremes(shape: Shape, rng: RngStream, rel_tol: float = DEFAULT_REL_TOL) -> ExtremePair:
    """One draw of (l1, lp).

    For n < p the nonzero spectrum equals that of W_n(I, p); l1 comes from
    the dual shape and lp is exactly zero, flagged ``degenerate``.
    """
    if shape.n >= shape.p:
        T = sample_bidiagonal(shape, rng)
        return ExtremePair(
            extreme_eigenvalue(T, "largest", rel_tol),
            extreme_eigenvalue(T, "smallest", rel_tol),
        )
    T = sample_bidiagonal(Shape(shape.p, shape.n), rng)
    return ExtremePair(extreme_eigenvalue(T, "largest", rel_tol), 0.0, degenerate=True)


def resolve_threads(threads: int | None = None) -> int:
    """0 or None means: ``TWEDGE_THREADS`` if set, else all available CPUs."""
    if not threads:
        env = os.environ.get("TWEDGE_THREADS")
        threads = int(env) if env else 0
    if threads <= 0:
        try:
            threads = len(os.sched_getaffinity(0))
        except AttributeError:  # not available on every platform
            threads = os.cpu_count() or 1
    return max(1, threads)


def simulate_extremes(
    shape: Shape,
    reps: int,
    seed: int,
    threads: int | None = 1,
    rel_tol: float = DEFAULT_REL_TOL,
    backend: str | None = None,
):
    """Draw ``reps`` independent (l1, lp) pairs.

    Replication ``r`` uses stream ``(seed, r)``, so the output is the same
    for every thread count and chunking, and equals calling
    `sample_extremes` with ``RngStream(seed, r)`` for each r.

    Returns
    -------
    lam_max, lam_min : ndarray
    degenerate : bool
        True when n < p; ``lam_min`` is then all zeros.
    """
    if reps < 1:
        raise ValueError("reps must be positive")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    kernels = _backend.get(backend)
    degenerate = shape.n < shape.p
    n, p = (shape.p, shape.n) if degenerate else (shape.n, shape.p)
    starts = list(range(0, reps, CHUNK))

    def run(start):
        return kernels.simulate_extremes(n, p, seed, start, min(CHUNK, reps - start), rel_tol)

    workers = min(resolve_threads(threads), len(starts))
    if workers == 1:
        parts = [run(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    lam_max = np.concatenate([a for a, _ in parts])
    lam_min = np.zeros(reps) if degenerate else np.concatenate([b for _, b in parts])
    return lam_max, lam_min, degenerate
