# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Monte Carlo kernels.

Same stream recipe, Sturm recurrence and bisection rule as the pure-Python
kernels in ``_pykernels``; see ``twedge.rng`` for the generator definition.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, cos, fabs
from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t SEED_SALT = 0x6A09E667F3BCC909ULL
cdef uint64_t STREAM_SALT = 0xBB67AE8584CAA73BULL
cdef double TWO_PI = 6.283185307179586
cdef double INV_2_53 = 1.0 / 9007199254740992.0
cdef double EPS = 2.220446049250313e-16
cdef double TINY = 2.2250738585072014e-308
cdef int MAX_BISECT = 200

ctypedef struct Xoshiro:
    uint64_t s0
    uint64_t s1
    uint64_t s2
    uint64_t s3


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline void seed_stream(Xoshiro* st, uint64_t seed, uint64_t stream) noexcept nogil:
    cdef uint64_t sm = mix64(seed ^ SEED_SALT) + mix64(stream ^ STREAM_SALT)
    sm += GOLDEN
    st.s0 = mix64(sm)
    sm += GOLDEN
    st.s1 = mix64(sm)
    sm += GOLDEN
    st.s2 = mix64(sm)
    sm += GOLDEN
    st.s3 = mix64(sm)


cdef inline uint64_t rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t next_u64(Xoshiro* st) noexcept nogil:
    cdef uint64_t result = rotl(st.s1 * 5, 7) * 9
    cdef uint64_t t = st.s1 << 17
    st.s2 ^= st.s0
    st.s3 ^= st.s1
    st.s1 ^= st.s2
    st.s0 ^= st.s3
    st.s2 ^= t
    st.s3 = rotl(st.s3, 45)
    return result


cdef inline double uniform(Xoshiro* st) noexcept nogil:
    return (<double>(next_u64(st) >> 11) + 0.5) * INV_2_53


cdef inline double normal(Xoshiro* st) noexcept nogil:
    cdef double u1 = uniform(st)
    cdef double u2 = uniform(st)
    return sqrt(-2.0 * log(u1)) * cos(TWO_PI * u2)


cdef double gamma(Xoshiro* st, double shape) noexcept nogil:
    # shape >= 1 only; chi(1) is drawn as |normal|
    cdef double d, c, x, v, u, x2
    d = shape - 1.0 / 3.0
    c = 1.0 / sqrt(9.0 * d)
    while True:
        x = normal(st)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = uniform(st)
        x2 = x * x
        if u < 1.0 - 0.0331 * x2 * x2:
            return d * v
        if log(u) < 0.5 * x2 + d * (1.0 - v + log(v)):
            return d * v


cdef inline double chi(Xoshiro* st, long dof) noexcept nogil:
    if dof == 1:
        return fabs(normal(st))
    return sqrt(2.0 * gamma(st, 0.5 * dof))


cdef void gershgorin(const double* diag, const double* off, Py_ssize_t p,
                     double* lo, double* hi, double* norm) noexcept nogil:
    cdef Py_ssize_t i
    cdef double r, a, b, w
    for i in range(p):
        r = 0.0
        if i > 0:
            r += fabs(off[i - 1])
        if i < p - 1:
            r += fabs(off[i])
        a = diag[i] - r
        b = diag[i] + r
        w = fabs(diag[i]) + r
        if i == 0 or a < lo[0]:
            lo[0] = a
        if i == 0 or b > hi[0]:
            hi[0] = b
        if i == 0 or w > norm[0]:
            norm[0] = w


cdef Py_ssize_t sturm(const double* diag, const double* off, Py_ssize_t p,
                      double x, double norm) noexcept nogil:
    cdef double pivmin = -EPS * norm if norm > 0 else -TINY
    cdef Py_ssize_t count = 0, i
    cdef double d = diag[0] - x
    if d == 0.0:
        d = pivmin
    if d < 0.0:
        count += 1
    for i in range(1, p):
        d = (diag[i] - x) - off[i - 1] * off[i - 1] / d
        if d == 0.0:
            d = pivmin
        if d < 0.0:
            count += 1
    return count


cdef double bisect(const double* diag, const double* off, Py_ssize_t p,
                   bint largest, double rel_tol) noexcept nogil:
    cdef double lo = 0.0, hi = 0.0, norm = 0.0, mid
    cdef Py_ssize_t target = p if largest else 1
    cdef int it
    gershgorin(diag, off, p, &lo, &hi, &norm)
    for it in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if not (hi - lo > rel_tol * (fabs(mid) if fabs(mid) > 1.0 else 1.0)):
            break
        if mid <= lo or mid >= hi:
            break
        if sturm(diag, off, p, mid, norm) >= target:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def sturm_count(diag, off, double x):
    cdef double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[::1] e = np.ascontiguousarray(off, dtype=np.float64)
    cdef Py_ssize_t p = d.shape[0]
    cdef double lo = 0.0, hi = 0.0, norm = 0.0
    if e.shape[0] != p - 1:
        raise ValueError("off-diagonal must have length p - 1")
    if p == 0:
        return 0
    cdef const double* ep = &e[0] if p > 1 else NULL
    gershgorin(&d[0], ep, p, &lo, &hi, &norm)
    return int(sturm(&d[0], ep, p, x, norm))


def extreme_eigenvalue(diag, off, bint largest, double rel_tol):
    cdef double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[::1] e = np.ascontiguousarray(off, dtype=np.float64)
    cdef Py_ssize_t p = d.shape[0]
    if p == 0 or e.shape[0] != p - 1:
        raise ValueError("need p >= 1 and an off-diagonal of length p - 1")
    cdef const double* ep = &e[0] if p > 1 else NULL
    return bisect(&d[0], ep, p, largest, rel_tol)


def simulate_extremes(long n, long p, seed, start, long count, double rel_tol=1e-12):
    """Largest and smallest eigenvalue draws for streams start..start+count-1."""
    if n < p:
        raise ValueError("simulate_extremes needs n >= p")
    cdef uint64_t useed = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t ustart = <uint64_t>(int(start) & 0xFFFFFFFFFFFFFFFF)
    out_max = np.empty(count)
    out_min = np.empty(count)
    cdef double[::1] mx = out_max
    cdef double[::1] mn = out_min
    cdef double* work = <double*> malloc(2 * p * sizeof(double))
    if work == NULL:
        raise MemoryError()
    cdef double* diag = work
    cdef double* off = work + p
    cdef double* bd
    cdef Xoshiro st
    cdef long r, i
    cdef double b_prev_sub, b_ii, b_sub
    try:
        with nogil:
            for r in range(count):
                seed_stream(&st, useed, ustart + <uint64_t>r)
                b_prev_sub = 0.0
                for i in range(p):
                    b_ii = chi(&st, n - i)
                    diag[i] = b_ii * b_ii + b_prev_sub * b_prev_sub
                    if i < p - 1:
                        b_sub = chi(&st, p - 1 - i)
                        off[i] = b_sub * b_ii
                        b_prev_sub = b_sub
                mx[r] = bisect(diag, off, p, True, rel_tol)
                mn[r] = bisect(diag, off, p, False, rel_tol)
    finally:
        free(work)
    return out_max, out_min


def stream_u64(seed, stream_id, long count):
    cdef Xoshiro st
    seed_stream(&st, <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF),
                <uint64_t>(int(stream_id) & 0xFFFFFFFFFFFFFFFF))
    return [int(next_u64(&st)) for _ in range(count)]


def stream_chi(seed, stream_id, dofs):
    """Chi draws with the given degrees of freedom, in order, from one stream."""
    cdef Xoshiro st
    seed_stream(&st, <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF),
                <uint64_t>(int(stream_id) & 0xFFFFFFFFFFFFFFFF))
    return [chi(&st, int(k)) for k in dofs]
