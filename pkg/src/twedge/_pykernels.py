"""Pure-Python kernels: the fallback when the compiled extension is absent.

Scalar routines are plain loops; `simulate_extremes` vectorises across
replications with numpy, carrying one xoshiro256** state per replication so
each stream is consumed exactly as `twedge.rng.RngStream` would consume it.
"""
from __future__ import annotations

import math

import numpy as np

from .rng import GOLDEN, INV_2_53, MASK64, TWO_PI, initial_state, mix64

EPS = np.finfo(float).eps
TINY = np.finfo(float).tiny
MAX_BISECT = 200

_U5 = np.uint64(5)
_U9 = np.uint64(9)
_U7 = np.uint64(7)
_U57 = np.uint64(57)
_U17 = np.uint64(17)
_U45 = np.uint64(45)
_U19 = np.uint64(19)
_U11 = np.uint64(11)

# numpy's SIMD log differs from libm in the last bit for ~0.4% of inputs;
# libm keeps these streams bit-identical to RngStream and the C kernel.
_libm_log = np.frompyfunc(math.log, 1, 1)


def _log(a):
    return _libm_log(a).astype(float)


# ---------------------------------------------------------------------------
# tridiagonal eigenvalues

def gershgorin(diag, off):
    p = len(diag)
    lo = hi = None
    norm = 0.0
    for i in range(p):
        r = 0.0
        if i > 0:
            r += abs(off[i - 1])
        if i < p - 1:
            r += abs(off[i])
        a, b = diag[i] - r, diag[i] + r
        lo = a if lo is None or a < lo else lo
        hi = b if hi is None or b > hi else hi
        w = abs(diag[i]) + r
        norm = w if w > norm else norm
    return lo, hi, norm


def sturm_count_norm(diag, off, x, norm):
    pivmin = -EPS * norm if norm > 0 else -TINY
    count = 0
    d = diag[0] - x
    if d == 0.0:
        d = pivmin
    if d < 0.0:
        count += 1
    for i in range(1, len(diag)):
        d = (diag[i] - x) - off[i - 1] * off[i - 1] / d
        if d == 0.0:
            d = pivmin
        if d < 0.0:
            count += 1
    return count


def sturm_count(diag, off, x):
    _, _, norm = gershgorin(diag, off)
    return sturm_count_norm(diag, off, x, norm)


def extreme_eigenvalue(diag, off, largest, rel_tol):
    diag = [float(v) for v in diag]
    off = [float(v) for v in off]
    p = len(diag)
    lo, hi, norm = gershgorin(diag, off)
    target = p if largest else 1
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if not hi - lo > rel_tol * max(1.0, abs(mid)):
            break
        if mid <= lo or mid >= hi:
            break
        if sturm_count_norm(diag, off, mid, norm) >= target:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# vectorised streams

class _Streams:
    def __init__(self, seed, start, count):
        seed &= MASK64
        states = np.array([initial_state(seed, start + i) for i in range(count)], dtype=np.uint64)
        self.s = [states[:, j].copy() for j in range(4)]

    def next_u64(self, idx):
        s0, s1, s2, s3 = (a[idx] for a in self.s)
        x = s1 * _U5
        result = ((x << _U7) | (x >> _U57)) * _U9
        t = s1 << _U17
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = (s3 << _U45) | (s3 >> _U19)
        self.s[0][idx] = s0
        self.s[1][idx] = s1
        self.s[2][idx] = s2
        self.s[3][idx] = s3
        return result

    def uniform(self, idx):
        return ((self.next_u64(idx) >> _U11).astype(float) + 0.5) * INV_2_53

    def normal(self, idx):
        u1 = self.uniform(idx)
        u2 = self.uniform(idx)
        return np.sqrt(-2.0 * _log(u1)) * np.cos(TWO_PI * u2)

    def gamma(self, shape, idx):
        """Gamma(shape >= 1) for every stream in ``idx``."""
        d = shape - 1.0 / 3.0
        c = 1.0 / np.sqrt(9.0 * d)
        out = np.empty(len(idx))
        pending = np.arange(len(idx))
        while len(pending):
            x = self.normal(idx[pending])
            v = 1.0 + c * x
            ok = v > 0.0
            cand = pending[ok]
            x = x[ok]
            v = v[ok]
            v = v * v * v
            u = self.uniform(idx[cand])
            x2 = x * x
            accept = u < 1.0 - 0.0331 * x2 * x2
            slow = ~accept
            if slow.any():
                accept[slow] = _log(u[slow]) < 0.5 * x2[slow] + d * (1.0 - v[slow] + _log(v[slow]))
            out[cand[accept]] = d * v[accept]
            done = np.zeros(len(pending), dtype=bool)
            done[np.flatnonzero(ok)[accept]] = True
            pending = pending[~done]
        return out

    def chi(self, dof, idx):
        if dof == 1:
            return np.abs(self.normal(idx))
        return np.sqrt(2.0 * self.gamma(0.5 * dof, idx))


def bidiagonal_batch(n, p, seed, start, count):
    """Tridiagonal B B^T for ``count`` consecutive streams, as (diag, off)."""
    streams = _Streams(seed, start, count)
    idx = np.arange(count)
    b_diag = np.empty((count, p))
    b_sub = np.empty((count, max(p - 1, 0)))
    for i in range(p):
        b_diag[:, i] = streams.chi(n - i, idx)
        if i < p - 1:
            b_sub[:, i] = streams.chi(p - 1 - i, idx)
    diag = b_diag * b_diag
    diag[:, 1:] += b_sub * b_sub
    off = b_sub * b_diag[:, :-1]
    return diag, off


def _sturm_batch(diag, off, x, pivmin):
    p = diag.shape[1]
    d = diag[:, 0] - x
    d = np.where(d == 0.0, pivmin, d)
    count = (d < 0.0).astype(np.int64)
    for i in range(1, p):
        d = (diag[:, i] - x) - off[:, i - 1] * off[:, i - 1] / d
        d = np.where(d == 0.0, pivmin, d)
        count += d < 0.0
    return count


def _bisect_batch(diag, off, largest, rel_tol):
    m, p = diag.shape
    radius = np.zeros((m, p))
    if p > 1:
        a = np.abs(off)
        radius[:, 1:] += a
        radius[:, :-1] += a
    lo = (diag - radius).min(axis=1)
    hi = (diag + radius).max(axis=1)
    norm = (np.abs(diag) + radius).max(axis=1)
    pivmin = np.where(norm > 0, -EPS * norm, -TINY)
    target = p if largest else 1
    active = np.arange(m)
    for _ in range(MAX_BISECT):
        l, h = lo[active], hi[active]
        mid = 0.5 * (l + h)
        go = (h - l > rel_tol * np.maximum(1.0, np.abs(mid))) & (mid > l) & (mid < h)
        active = active[go]
        if not len(active):
            break
        mid = mid[go]
        c = _sturm_batch(diag[active], off[active], mid, pivmin[active])
        below = c >= target
        hi[active[below]] = mid[below]
        lo[active[~below]] = mid[~below]
    return 0.5 * (lo + hi)


def simulate_extremes(n, p, seed, start, count, rel_tol=1e-12):
    """Largest and smallest eigenvalue draws for streams start..start+count-1."""
    if n < p:
        raise ValueError("simulate_extremes needs n >= p")
    diag, off = bidiagonal_batch(n, p, seed, start, count)
    lam_max = _bisect_batch(diag, off, True, rel_tol)
    lam_min = _bisect_batch(diag, off, False, rel_tol)
    return lam_max, lam_min


def stream_u64(seed, stream_id, count):
    streams = _Streams(seed, stream_id, 1)
    idx = np.zeros(1, dtype=np.int64)
    return [int(streams.next_u64(idx)[0]) for _ in range(count)]


__all__ = [
    "sturm_count",
    "extreme_eigenvalue",
    "simulate_extremes",
    "bidiagonal_batch",
    "stream_u64",
    "mix64",
    "GOLDEN",
]
