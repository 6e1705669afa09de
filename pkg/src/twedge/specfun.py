"""Airy function, Gauss-Legendre rules and dense determinants.

Everything here is self-contained numpy; no external special-function
library is used.  All functions accept scalars or arrays and are pure.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadRule",
    "airy_ai",
    "airy_ai_prime",
    "airy_pair",
    "gauss_legendre_rule",
    "det_dense",
    "det_batch",
]

# Ai(0) = 3^(-2/3)/Gamma(2/3) and -Ai'(0) = 3^(-1/3)/Gamma(1/3).
AI0 = 0.355028053887817239260063186004
AIP0 = 0.258819403792806798405183560189

# Piecewise layout: oscillatory asymptotics below TAYLOR_LO, a Taylor
# expansion about TAYLOR_CENTER on [TAYLOR_LO, SERIES_LO), the Maclaurin series
# on [SERIES_LO, SERIES_HI] and the exponentially scaled asymptotics above.
# The Maclaurin sums lose ~1e-12 to cancellation near x = -7, and the
# optimally truncated oscillatory expansion is only good to ~1e-8 at x = -5,
# hence the extra band.
TAYLOR_LO = -7.5
SERIES_LO = -5.0
SERIES_HI = 5.5
SERIES_RTOL = 1e-18
TAYLOR_CENTER = -6.25
# Ai and Ai' at TAYLOR_CENTER, 30 significant digits.
_AI_CENTER = -0.349612051610890509854642947549
_AIP_CENTER = -0.191086259523417154368557740364
_TAYLOR_TERMS = 48
_SERIES_MAXITER = 100
_ASYMP_MAXTERMS = 60

_SQRT_PI = np.sqrt(np.pi)


def _asymptotic_coefficients(kmax):
    u = np.empty(kmax)
    v = np.empty(kmax)
    u[0] = v[0] = 1.0
    for k in range(1, kmax):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        v[k] = -(6 * k + 1) / (6 * k - 1) * u[k]
    return u, v


_U, _V = _asymptotic_coefficients(_ASYMP_MAXTERMS)


def _taylor_coefficients(x0, a0, a1, nterms):
    # y'' = x y  =>  (n+2)(n+1) a_{n+2} = x0 a_n + a_{n-1}
    a = np.zeros(nterms)
    a[0], a[1] = a0, a1
    for n in range(nterms - 2):
        prev = a[n - 1] if n >= 1 else 0.0
        a[n + 2] = (x0 * a[n] + prev) / ((n + 2) * (n + 1))
    return a


_TAYLOR = _taylor_coefficients(TAYLOR_CENTER, _AI_CENTER, _AIP_CENTER, _TAYLOR_TERMS)
_TAYLOR_D = _TAYLOR[1:] * np.arange(1, _TAYLOR_TERMS)


def _taylor(x):
    h = x - TAYLOR_CENTER
    ai = np.polynomial.polynomial.polyval(h, _TAYLOR)
    aip = np.polynomial.polynomial.polyval(h, _TAYLOR_D)
    return ai, aip


def _kahan_add(total, comp, term):
    y = term - comp
    t = total + y
    comp = (t - total) - y
    return t, comp


def _series(x):
    """Maclaurin series for (Ai, Ai') with compensated summation."""
    x3 = x * x * x
    # Ai = AI0*f - AIP0*g, with f, g the even/odd power series solutions.
    f = np.zeros_like(x); cf = np.zeros_like(x); tf = np.ones_like(x)
    g = np.zeros_like(x); cg = np.zeros_like(x); tg = x.copy()
    fp = np.zeros_like(x); cfp = np.zeros_like(x); tfp = 0.5 * x * x
    gp = np.zeros_like(x); cgp = np.zeros_like(x); tgp = np.ones_like(x)
    for k in range(_SERIES_MAXITER):
        f, cf = _kahan_add(f, cf, tf)
        g, cg = _kahan_add(g, cg, tg)
        fp, cfp = _kahan_add(fp, cfp, tfp)
        gp, cgp = _kahan_add(gp, cgp, tgp)
        tf = tf * x3 / ((3 * k + 2) * (3 * k + 3))
        tg = tg * x3 / ((3 * k + 3) * (3 * k + 4))
        tfp = tfp * x3 / ((3 * k + 3) * (3 * k + 5))
        tgp = tgp * x3 / ((3 * k + 1) * (3 * k + 3))
        done = (
            (np.abs(tf) <= SERIES_RTOL * np.abs(f))
            & (np.abs(tg) <= SERIES_RTOL * np.abs(g))
            & (np.abs(tfp) <= SERIES_RTOL * np.abs(fp))
            & (np.abs(tgp) <= SERIES_RTOL * np.abs(gp))
        )
        if done.all():
            break
    return AI0 * f - AIP0 * g, AI0 * fp - AIP0 * gp


def _truncated_sums(zeta, coeffs, oscillatory):
    """Parity-split sums of coeffs[k] zeta^-k, stopping at the smallest term.

    Returns (even, odd) with even = sum_j s_j c_{2j} zeta^{-2j} and
    odd = sum_j s_j c_{2j+1} zeta^{-2j-1}, where s_j = (-1)^j if
    ``oscillatory`` else 1.
    """
    even = np.zeros_like(zeta)
    odd = np.zeros_like(zeta)
    inv = 1.0 / zeta
    power = np.ones_like(zeta)
    active = np.ones(zeta.shape, dtype=bool)
    prev = np.full_like(zeta, np.inf)
    for k in range(len(coeffs)):
        term = coeffs[k] * power
        mag = np.abs(term)
        active &= mag < prev
        if not active.any():
            break
        sign = -1.0 if oscillatory and (k // 2) % 2 else 1.0
        contrib = np.where(active, sign * term, 0.0)
        if k % 2 == 0:
            even += contrib
        else:
            odd += contrib
        active &= mag > 1e-17 * np.abs(even)
        prev = mag
        power = power * inv
    return even, odd


def _asymptotic_positive(x):
    zeta = (2.0 / 3.0) * x * np.sqrt(x)
    q = np.sqrt(np.sqrt(x))
    scale = np.exp(-zeta) / (2.0 * _SQRT_PI)
    ue, uo = _truncated_sums(zeta, _U, False)
    ve, vo = _truncated_sums(zeta, _V, False)
    return scale / q * (ue - uo), -scale * q * (ve - vo)


def _asymptotic_negative(x):
    y = -x
    zeta = (2.0 / 3.0) * y * np.sqrt(y)
    q = np.sqrt(np.sqrt(y))
    theta = zeta - 0.25 * np.pi
    c, s = np.cos(theta), np.sin(theta)
    ue, uo = _truncated_sums(zeta, _U, True)
    ve, vo = _truncated_sums(zeta, _V, True)
    ai = (c * ue + s * uo) / (_SQRT_PI * q)
    aip = q * (s * ve - c * vo) / _SQRT_PI
    return ai, aip


def airy_pair(x):
    """Return ``(Ai(x), Ai'(x))`` for scalar or array ``x``.

    Raises
    ------
    ValueError
        If any input is NaN or infinite.
    """
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise ValueError("airy: argument must be finite")
    flat = xa.ravel()
    ai = np.empty_like(flat)
    aip = np.empty_like(flat)

    mid = (flat >= SERIES_LO) & (flat <= SERIES_HI)
    hi = flat > SERIES_HI
    band = (flat >= TAYLOR_LO) & (flat < SERIES_LO)
    lo = flat < TAYLOR_LO
    if mid.any():
        ai[mid], aip[mid] = _series(flat[mid])
    if band.any():
        ai[band], aip[band] = _taylor(flat[band])
    if hi.any():
        ai[hi], aip[hi] = _asymptotic_positive(flat[hi])
    if lo.any():
        ai[lo], aip[lo] = _asymptotic_negative(flat[lo])

    ai = ai.reshape(xa.shape)
    aip = aip.reshape(xa.shape)
    if xa.ndim == 0:
        return float(ai), float(aip)
    return ai, aip


def airy_ai(x):
    """Airy function Ai, absolute error below 1e-12 on [-12, 20]."""
    return airy_pair(x)[0]


def airy_ai_prime(x):
    """Derivative Ai' of the Airy function."""
    return airy_pair(x)[1]


@dataclass(frozen=True)
class QuadRule:
    """Gauss-Legendre nodes and weights on (-1, 1)."""

    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.nodes)

    def integrate(self, func, a=-1.0, b=1.0):
        half = 0.5 * (b - a)
        x = 0.5 * (a + b) + half * self.nodes
        return half * float(np.dot(self.weights, func(x)))


def _legendre_with_derivative(m, x):
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, m + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = m * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


def gauss_legendre_rule(m: int) -> QuadRule:
    """m-point Gauss-Legendre rule, exact for polynomials of degree 2m - 1.

    Nodes are Newton-refined roots of P_m, mirrored so the rule is exactly
    symmetric about zero.
    """
    if not isinstance(m, (int, np.integer)) or not 2 <= m <= 512:
        raise ValueError(f"quadrature order must be an integer in [2, 512], got {m!r}")
    m = int(m)
    half = (m + 1) // 2
    i = np.arange(1, half + 1)
    x = np.cos(np.pi * (i - 0.25) / (m + 0.5))
    for _ in range(100):
        p, dp = _legendre_with_derivative(m, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= 1e-15:
            break
    _, dp = _legendre_with_derivative(m, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)

    # x is decreasing and positive (x = 0 last when m is odd).
    if m % 2:
        x[-1] = 0.0
        nodes = np.concatenate([-x[:-1], [0.0], x[-2::-1]])
        weights = np.concatenate([w, w[-2::-1]])
    else:
        nodes = np.concatenate([-x, x[::-1]])
        weights = np.concatenate([w, w[::-1]])
    return QuadRule(nodes=nodes, weights=weights)


def det_batch(mats):
    """Determinants of a stack of square matrices, shape ``(..., m, m)``.

    Gaussian elimination with partial (row) pivoting; the permutation sign is
    tracked explicitly.  Singular input yields zero up to round-off.
    """
    a = np.array(mats, dtype=float, copy=True)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError("det: expected square matrices")
    batch_shape = a.shape[:-2]
    m = a.shape[-1]
    a = a.reshape(-1, m, m)
    nb = a.shape[0]
    det = np.ones(nb)
    rows = np.arange(nb)
    for k in range(m):
        piv = k + np.argmax(np.abs(a[:, k:, k]), axis=1)
        swap = piv != k
        if swap.any():
            idx = rows[swap]
            pk = piv[swap]
            tmp = a[idx, k, :].copy()
            a[idx, k, :] = a[idx, pk, :]
            a[idx, pk, :] = tmp
            det[swap] = -det[swap]
        pivot = a[:, k, k]
        det *= pivot
        if k + 1 < m:
            safe = np.where(pivot == 0.0, 1.0, pivot)
            factors = a[:, k + 1:, k] / safe[:, None]
            factors[pivot == 0.0] = 0.0
            a[:, k + 1:, k:] -= factors[:, :, None] * a[:, k, None, k:]
    return det.reshape(batch_shape)


def det_dense(matrix) -> float:
    """Determinant of a single square matrix of order at most 512."""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("det_dense: expected a square 2-D array")
    if a.shape[0] > 512:
        raise ValueError("det_dense: order must not exceed 512")
    return float(det_batch(a))
