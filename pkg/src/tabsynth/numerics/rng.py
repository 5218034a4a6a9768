"""Counter-based random streams.

Every draw is ``mix64(seed + counter * GAMMA)`` where ``mix64`` is the
SplitMix64 finalizer and ``GAMMA`` the golden-ratio increment. The counter
of draw ``i`` on sub-stream ``s`` is ``(s << 40) + i + 1``, so sub-stream 0
reproduces the reference SplitMix64 sequence for ``state = seed`` and
distinct sub-streams never share a counter value for the first 2**40 draws.
Because ``GAMMA`` is odd and ``mix64`` is a bijection on 64-bit words, no
two counter values map to the same output word.

Test vectors (seed 0, sub-stream 0)::

    0xE220A8397B1DCDAF
    0x6E789E6AA1B965F4
    0x06C45D188009454F

Uniforms take the top 53 bits ``k`` and return ``(k + 0.5) / 2**53``, which
is never exactly 0 or 1. Normals are ``normal_quantile(uniform)``, one
uniform per normal, so draw ``i`` depends only on ``(seed, stream, i)``.
"""

from __future__ import annotations

import numpy as np

from tabsynth.errors import DomainError

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
STREAM_BITS = 40
MAX_STREAMS = 1 << (64 - STREAM_BITS)

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GAMMA = np.uint64(GAMMA)


def mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 output finalizer, applied elementwise to uint64 arrays."""
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


class RngStream:
    """A seeded, explicitly advanced random stream.

    A stream is owned by one caller; pass it down, never share it between
    threads. ``spawn`` derives independent sub-streams of the same seed.
    """

    __slots__ = ("seed", "stream", "counter")

    def __init__(self, seed: int, stream: int = 0, counter: int = 0):
        if not 0 <= int(seed) <= MASK64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
        if not 0 <= int(stream) < MAX_STREAMS:
            raise DomainError(f"sub-stream index must lie in [0, {MAX_STREAMS}), got {stream}")
        self.seed = int(seed)
        self.stream = int(stream)
        self.counter = int(counter)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream={self.stream}, counter={self.counter})"

    def spawn(self, stream: int) -> RngStream:
        """Fresh stream on sub-stream ``stream`` of this seed, counter at zero."""
        return RngStream(self.seed, stream)

    def next_u64(self, n: int) -> np.ndarray:
        """Return the next ``n`` raw 64-bit words and advance the counter."""
        if n < 0:
            raise DomainError("draw count must be nonnegative")
        if self.counter + n >= 1 << STREAM_BITS:
            raise DomainError("sub-stream exhausted (2**40 draws)")
        base = (self.stream << STREAM_BITS) + self.counter + 1
        ctr = np.arange(n, dtype=np.uint64) + np.uint64(base)
        self.counter += n
        return mix64(np.uint64(self.seed) + ctr * _GAMMA)

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` uniforms strictly inside (0, 1)."""
        k = (self.next_u64(n) >> np.uint64(11)).astype(np.float64)
        return (k + 0.5) * 2.0**-53

    def integers(self, high: int, n: int) -> np.ndarray:
        """``n`` integers uniform on ``[0, high)``."""
        if high < 1:
            raise DomainError("upper bound must be at least 1")
        k = (self.next_u64(n) >> np.uint64(11)).astype(np.float64)
        idx = np.floor(k * 2.0**-53 * high).astype(np.int64)
        return np.minimum(idx, high - 1)

    def standard_normal(self, n: int) -> np.ndarray:
        from tabsynth.numerics.special import normal_quantile

        return normal_quantile(self.uniforms(n))


def rng_standard_normal(stream: RngStream) -> float:
    """Single standard-normal draw; advances ``stream`` by one."""
    return float(stream.standard_normal(1)[0])
