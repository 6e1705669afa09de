"""Centering and scaling constants for extreme Wishart eigenvalues.

For ``A ~ W_p(I, n)`` with largest eigenvalue l1 and smallest lp:

* ``(l1 - mu)/sigma`` is approximately F1, with the half-integer corrected
  constants (`constants_largest_new`) or the classical ones
  (`constants_largest_old`);
* ``(log lp - nu)/tau`` is approximately G1 when n > p
  (`constants_smallest`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .tw import TwGrid, f1_cdf, g1_cdf

Variant = Literal["new", "old"]

__all__ = [
    "Shape",
    "LinearScale",
    "LogScale",
    "SpikeTestResult",
    "constants_largest_new",
    "constants_largest_old",
    "constants_largest",
    "constants_smallest",
    "cdf_largest",
    "pvalue_largest",
    "cdf_smallest",
    "pvalue_smallest",
    "spiked_sequence",
]


@dataclass(frozen=True)
class Shape:
    """Dimensions of a white Wishart model W_p(I, n)."""

    n: int
    p: int

    def __post_init__(self):
        for name in ("n", "p"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"Shape.{name} must be a positive integer, got {v!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p", int(self.p))

    def __str__(self):
        return f"{self.n}x{self.p}"


@dataclass(frozen=True)
class LinearScale:
    mu: float
    sigma: float

    def standardize(self, x):
        return (np.asarray(x, dtype=float) - self.mu) / self.sigma


@dataclass(frozen=True)
class LogScale:
    mu_minus: float
    sigma_minus: float
    tau: float
    nu: float

    def standardize(self, x):
        return (np.log(np.asarray(x, dtype=float)) - self.nu) / self.tau


@dataclass(frozen=True)
class SpikeTestResult:
    k: int
    tau_sq_hat: float
    statistic: float
    pvalue: float


def _edge(a, b):
    ra, rb = math.sqrt(a), math.sqrt(b)
    return LinearScale(mu=(ra + rb) ** 2, sigma=(ra + rb) * (1.0 / ra + 1.0 / rb) ** (1.0 / 3.0))


def constants_largest_new(shape: Shape) -> LinearScale:
    """Half-integer corrected constants built from n - 1/2 and p - 1/2."""
    return _edge(shape.n - 0.5, shape.p - 0.5)


def constants_largest_old(shape: Shape) -> LinearScale:
    """Classical constants built from n - 1 and p; needs n >= 2."""
    if shape.n < 2:
        raise ValueError("classical constants need n >= 2")
    return _edge(shape.n - 1.0, float(shape.p))


def constants_largest(shape: Shape, variant: Variant = "new") -> LinearScale:
    if variant == "new":
        return constants_largest_new(shape)
    if variant == "old":
        return constants_largest_old(shape)
    raise ValueError(f"unknown variant {variant!r}; expected 'new' or 'old'")


def constants_smallest(shape: Shape) -> LogScale:
    """Log-scale constants for the smallest eigenvalue; needs n >= p + 1."""
    if shape.n <= shape.p:
        raise ValueError("smallest-eigenvalue constants need n >= p + 1")
    rn, rp = math.sqrt(shape.n - 0.5), math.sqrt(shape.p - 0.5)
    mu = (rn - rp) ** 2
    sigma = (rn - rp) * (1.0 / rp - 1.0 / rn) ** (1.0 / 3.0)
    tau = sigma / mu
    return LogScale(mu_minus=mu, sigma_minus=sigma, tau=tau, nu=math.log(mu) + tau * tau / 8.0)


def _check_nonnegative(x):
    if np.any(np.asarray(x) < 0) or not np.all(np.isfinite(x)):
        raise ValueError("eigenvalue must be finite and non-negative")


def cdf_largest(x, shape: Shape, variant: Variant = "new", grid: TwGrid | None = None):
    """Approximate P(l1 <= x) as F1((x - mu)/sigma)."""
    _check_nonnegative(x)
    scale = constants_largest(shape, variant)
    return f1_cdf(scale.standardize(x) if np.ndim(x) else float(scale.standardize(x)), grid)


def pvalue_largest(
    x,
    shape: Shape,
    grid: TwGrid | None = None,
    estimate_scale: bool = False,
    trace: float | None = None,
    variant: Variant = "new",
):
    """Upper-tail p-value of the largest eigenvalue ``x`` under W_p(I, n).

    With ``estimate_scale`` the unknown noise level is replaced by the
    plug-in ``trace/(n p)``, where ``trace`` is the trace of the same matrix
    ``x`` is an eigenvalue of; the statistic becomes ``n p x / trace``.
    """
    if estimate_scale:
        if trace is None or not trace > 0:
            raise ValueError("estimate_scale requires a positive trace")
        x = np.asarray(x, dtype=float) * (shape.n * shape.p / trace)
        if np.ndim(x) == 0:
            x = float(x)
    return 1.0 - cdf_largest(x, shape, variant, grid)


def cdf_smallest(x, shape: Shape, grid: TwGrid | None = None):
    """Approximate P(lp <= x) as G1((log x - nu)/tau)."""
    if np.any(np.asarray(x) <= 0) or not np.all(np.isfinite(x)):
        raise ValueError("smallest eigenvalue must be finite and positive")
    scale = constants_smallest(shape)
    z = scale.standardize(x)
    return g1_cdf(z if np.ndim(x) else float(z), grid)


def pvalue_smallest(x, shape: Shape, grid: TwGrid | None = None):
    """Lower-tail p-value: small values of lp are the extreme ones."""
    return cdf_smallest(x, shape, grid)


def spiked_sequence(sample_eigs, n: int, k_max: int | None = None,
                    grid: TwGrid | None = None, variant: Variant = "new"):
    """Test the nested hypotheses H_k: at most k spikes, for k = 0..k_max.

    For each k the noise level is estimated by the mean of the p - k smallest
    eigenvalues, the (k+1)-th largest eigenvalue is standardised with the
    constants of shape (n, p - k), and the upper-tail F1 probability is
    reported as a conservative p-value.

    Parameters
    ----------
    sample_eigs : sequence of float
        Sample eigenvalues, non-negative, sorted in descending order.  Any
        common scale (covariance or Wishart) gives the same statistics.
    n : int
        Degrees of freedom.
    k_max : int, optional
        Largest hypothesis index, at most p - 2; defaults to p - 2.
    """
    eigs = np.asarray(sample_eigs, dtype=float)
    if eigs.ndim != 1 or len(eigs) < 2:
        raise ValueError("need at least two eigenvalues")
    if np.any(eigs < 0) or not np.all(np.isfinite(eigs)):
        raise ValueError("eigenvalues must be finite and non-negative")
    if np.any(np.diff(eigs) > 0):
        raise ValueError("eigenvalues must be sorted in descending order")
    p = len(eigs)
    if k_max is None:
        k_max = p - 2
    if not 0 <= k_max <= p - 2:
        raise ValueError(f"k_max must lie in [0, {p - 2}]")

    results = []
    for k in range(k_max + 1):
        tail = eigs[k:]
        tau_sq = float(tail.mean())
        if tau_sq <= 0:
            raise ValueError("noise estimate is zero; eigenvalues are degenerate")
        scale = constants_largest(Shape(n, p - k), variant)
        stat = (n * eigs[k] / tau_sq - scale.mu) / scale.sigma
        pval = 1.0 - f1_cdf(float(stat), grid)
        results.append(SpikeTestResult(k=k, tau_sq_hat=tau_sq, statistic=float(stat), pvalue=pval))
    return results
