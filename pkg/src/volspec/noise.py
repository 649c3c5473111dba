"""Seedable stream of standard normal deviates.

Raw 64-bit words come from the PCG64 permuted congruential generator (numpy's
implementation, seeded through ``SeedSequence``). Each word is mapped to a
uniform on [0, 1) with 53-bit resolution and pairs of uniforms are turned into
normals with the Marsaglia polar method. Rejected pairs are part of the
stream, so a given seed always yields the same sequence regardless of how the
deviates are requested (one at a time or in blocks).
"""

import numpy as np

from volspec._backend import kernels

_BLOCK_WORDS = 1 << 12


class NoiseSource:
    """Deterministic standard normal generator owned by a single consumer.

    Parameters
    ----------
    seed : int
        Non-negative integer below 2**64.
    """

    def __init__(self, seed, _kernels=None):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be in [0, 2**64), got {seed}")
        self.seed = seed
        self._bitgen = np.random.PCG64(seed)
        self._kernels = kernels if _kernels is None else _kernels
        self._buf = np.empty(0)
        self._pos = 0

    def _refill(self, need):
        words = max(_BLOCK_WORDS, 2 * int(need * 1.3) + 64)
        fresh = self._kernels.polar_normals(self._bitgen.random_raw(words))
        rest = self._buf[self._pos:]
        self._buf = np.concatenate([rest, fresh]) if rest.size else fresh
        self._pos = 0

    def next_normal(self):
        """Return the next deviate as a Python float."""
        if self._pos >= self._buf.shape[0]:
            self._refill(1)
        value = self._buf[self._pos]
        self._pos += 1
        return float(value)

    def normals(self, n):
        """Return the next ``n`` deviates of the stream as a new array."""
        n = int(n)
        while self._buf.shape[0] - self._pos < n:
            self._refill(n - (self._buf.shape[0] - self._pos))
        out = self._buf[self._pos:self._pos + n].copy()
        self._pos += n
        return out


def next_normal(src):
    """Draw one standard normal deviate from ``src``."""
    return src.next_normal()
