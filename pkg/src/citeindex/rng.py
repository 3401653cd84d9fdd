"""Portable counter-based random stream.

Uniforms come from SplitMix64 (Steele, Lea & Flood 2014): the i-th output
(i = 0, 1, ...) for seed ``s`` is ``mix(s + (i + 1) * 0x9E3779B97F4A7C15)``
with all arithmetic modulo 2**64, where::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

A uniform on [0, 1) is ``(output >> 11) * 2**-53``.  The k-th standard
normal uses uniforms ``u1 = U(2k)``, ``u2 = U(2k + 1)`` and the cosine
branch of Box-Muller, ``sqrt(-2 log1p(-u1)) * cos(2 pi u2)``.

Because each draw is a pure function of (seed, position), blocks of the
stream can be produced with vectorised numpy code and still match a plain
sequential implementation in any language bit-for-bit (up to the libm
``log``/``cos`` used for normals).
"""

import numpy as np

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed, start, count):
    """Raw 64-bit outputs ``start .. start + count - 1`` as a uint64 array."""
    seed = int(seed) & MASK64
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed) + idx * np.uint64(GOLDEN_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


class Stream:
    """Sequential view over the SplitMix64 stream for one seed.

    Every call advances a cursor, so the sequence of calls fully determines
    which stream positions are consumed.
    """

    def __init__(self, seed):
        self.seed = int(seed) & MASK64
        self.position = 0

    def _take(self, count):
        out = splitmix64(self.seed, self.position, count)
        self.position += count
        return out

    def uniform(self, size):
        size = int(np.prod(size)) if np.ndim(size) else int(size)
        bits = self._take(size) >> np.uint64(11)
        return bits.astype(np.float64) * 2.0**-53

    def normal(self, shape):
        shape = (shape,) if np.ndim(shape) == 0 else tuple(shape)
        count = int(np.prod(shape))
        u = self.uniform(2 * count).reshape(count, 2)
        z = np.sqrt(-2.0 * np.log1p(-u[:, 0])) * np.cos(2.0 * np.pi * u[:, 1])
        return z.reshape(shape)
