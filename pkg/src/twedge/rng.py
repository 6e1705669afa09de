"""Counter-split pseudo-random streams.

Each stream is a xoshiro256** generator whose 256-bit state is filled by
SplitMix64 from a key derived from ``(seed, stream_id)``.  One stream is used
per Monte Carlo replication, so a replication's draws depend only on the
master seed and its index, never on how replications are spread over
workers.

The compiled and vectorised kernels implement exactly the same recipe:

* ``uniform``: ``((x >> 11) + 0.5) * 2**-53``, strictly inside (0, 1);
* ``normal``: Box-Muller, ``sqrt(-2 log u1) * cos(2 pi u2)`` (one output
  per pair, the sine half is discarded);
* ``gamma(a)``: Marsaglia-Tsang for ``a >= 1``; for ``a < 1`` draw
  ``gamma(a + 1)`` then multiply by ``u**(1/a)``;
* ``chi(1)``: ``|normal|``; ``chi(k)`` for ``k >= 2``: ``sqrt(2 * gamma(k/2))``.

``chi`` never takes the ``a < 1`` gamma branch: ``pow`` is not correctly
rounded on every platform, which would break bit-identity between kernels.
"""
from __future__ import annotations

import math

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
SEED_SALT = 0x6A09E667F3BCC909
STREAM_SALT = 0xBB67AE8584CAA73B
TWO_PI = 6.283185307179586
INV_2_53 = 1.0 / 9007199254740992.0

__all__ = ["RngStream", "stream_key", "sample_chi", "sample_gamma"]


def mix64(z: int) -> int:
    """SplitMix64 output finaliser."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, stream_id: int) -> int:
    return (mix64(seed ^ SEED_SALT) + mix64(stream_id ^ STREAM_SALT)) & MASK64


def initial_state(seed: int, stream_id: int):
    sm = stream_key(seed & MASK64, stream_id & MASK64)
    state = []
    for _ in range(4):
        sm = (sm + GOLDEN) & MASK64
        state.append(mix64(sm))
    return state


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


class RngStream:
    """Single-owner xoshiro256** stream identified by ``(seed, stream_id)``."""

    __slots__ = ("seed", "stream_id", "_s")

    def __init__(self, seed: int, stream_id: int = 0):
        if seed < 0 or stream_id < 0:
            raise ValueError("seed and stream_id must be non-negative")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._s = initial_state(self.seed, self.stream_id)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        return ((self.next_u64() >> 11) + 0.5) * INV_2_53

    def normal(self) -> float:
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(TWO_PI * u2)

    def gamma(self, shape: float) -> float:
        return sample_gamma(shape, self)

    def chi(self, dof: int) -> float:
        return sample_chi(dof, self)


def sample_gamma(shape: float, rng: RngStream) -> float:
    """Gamma(shape, scale 1) variate by Marsaglia-Tsang rejection."""
    if not shape > 0:
        raise ValueError("gamma shape must be positive")
    if shape < 1.0:
        g = sample_gamma(shape + 1.0, rng)
        return g * rng.uniform() ** (1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = rng.normal()
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = rng.uniform()
        x2 = x * x
        if u < 1.0 - 0.0331 * x2 * x2:
            return d * v
        if math.log(u) < 0.5 * x2 + d * (1.0 - v + math.log(v)):
            return d * v


def sample_chi(dof: int, rng: RngStream) -> float:
    """Chi variate with ``dof`` degrees of freedom."""
    if isinstance(dof, bool) or int(dof) != dof or dof < 1:
        raise ValueError(f"chi degrees of freedom must be a positive integer, got {dof!r}")
    if dof == 1:
        return abs(rng.normal())
    return math.sqrt(2.0 * sample_gamma(0.5 * dof, rng))
