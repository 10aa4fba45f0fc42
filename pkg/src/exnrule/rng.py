"""Counter-based random streams.

Every random draw in the package comes from an :class:`RngStream`, an immutable
``(seed, stream_id)`` pair. The bit source is Philox4x64-10 (numpy's
``np.random.Philox``) with the 128-bit key ``seed | (stream_id << 64)`` and a
counter starting at zero, so the raw uint64 sequence of a stream is fixed by
the pair alone and does not depend on thread schedules or on any other stream.

Transforms applied on top of the raw words are implemented here rather than
taken from ``np.random.Generator`` so they cannot drift between numpy releases:

* uniform in [0, 1):  ``(x >> 11) * 2**-53``
* integer in [0, h):  bitmask rejection, ``x & (2**bit_length(h-1) - 1)``,
  accepted when below ``h``, consumed in order
* standard normal:    Box-Muller on consecutive uniform pairs
  ``(u1, u2)``: ``sqrt(-2 ln(1-u1)) * (cos(2 pi u2), sin(2 pi u2))``
* permutation:        Fisher-Yates, ``i = n-1 .. 1``, swap ``i`` with ``j in [0, i]``

Uniforms and integers are bit-exact on every platform. Normals go through
``log``/``cos``/``sin`` and are bit-exact for a fixed platform libm.

Child streams are derived with :func:`derive_seed`, a SplitMix64 chain.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *path: int) -> int:
    """Hash ``seed`` and an integer path into a new 64-bit seed.

    ``h0 = splitmix64(seed)``, then ``h <- splitmix64(h ^ splitmix64(p))`` for each
    element ``p`` of the path.
    """
    h = splitmix64(seed & MASK64)
    for p in path:
        h = splitmix64(h ^ splitmix64(int(p) & MASK64))
    return h


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= int(v) <= MASK64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {v}")
            object.__setattr__(self, name, int(v))

    def sampler(self) -> "Sampler":
        """Fresh sampler positioned at the start of this stream."""
        return Sampler(self)

    def spawn(self, i: int) -> "RngStream":
        return RngStream(derive_seed(self.seed, self.stream_id), i)


class Sampler:
    """Stateful reader over one stream. Not thread-safe; make one per task."""

    def __init__(self, stream: RngStream):
        self._bits = np.random.Philox(key=stream.seed | (stream.stream_id << 64))

    def raw(self, size: int) -> np.ndarray:
        return np.asarray(self._bits.random_raw(size), dtype=np.uint64)

    def uniform(self, size: int) -> np.ndarray:
        return (self.raw(size) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def integers(self, high: int, size: int) -> np.ndarray:
        """``size`` integers uniform on ``[0, high)``."""
        if high < 1:
            raise ValueError("high must be >= 1")
        if high == 1:
            return np.zeros(size, dtype=np.int64)
        mask = np.uint64((1 << (high - 1).bit_length()) - 1)
        out = np.empty(size, dtype=np.int64)
        filled = 0
        while filled < size:
            need = size - filled
            batch = self.raw(need) & mask
            ok = batch[batch < np.uint64(high)]
            take = min(len(ok), need)
            out[filled:filled + take] = ok[:take]
            filled += take
        return out

    def integer(self, high: int) -> int:
        return int(self.integers(high, 1)[0])

    def normal(self, size: int) -> np.ndarray:
        pairs = (size + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        theta = 2.0 * np.pi * u[:, 1]
        z = np.column_stack((r * np.cos(theta), r * np.sin(theta))).ravel()
        return z[:size]

    def permutation(self, n: int) -> np.ndarray:
        perm = np.arange(n, dtype=np.int64)
        for i in range(n - 1, 0, -1):
            j = self.integer(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    def choice_without_replacement(self, n: int, m: int) -> np.ndarray:
        """``m`` distinct values from ``range(n)``, returned sorted."""
        if not 0 <= m <= n:
            raise ValueError("need 0 <= m <= n")
        pool = np.arange(n, dtype=np.int64)
        for i in range(m):
            j = i + self.integer(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return np.sort(pool[:m])
