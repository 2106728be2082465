"""Counter-based deterministic random fields (SplitMix64 + Box-Muller).

The noise attacks must reproduce bit-identically for a given seed on any
platform and under any parallel schedule, so randomness is derived statelessly
per sample index instead of from a shared generator.  Word i of a stream is
``splitmix64_finalize(seed + (i + 1) * GOLDEN)``, the standard SplitMix64
sequence.  Uniform doubles take the top 53 bits; Gaussian samples combine two
stream words via the Box-Muller transform.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_TWO53 = float(1 << 53)


def _finalize(x: np.ndarray) -> np.ndarray:
    x = (x ^ (x >> np.uint64(30))) * _MIX1
    x = (x ^ (x >> np.uint64(27))) * _MIX2
    return x ^ (x >> np.uint64(31))


def words(seed: int, start: int, count: int) -> np.ndarray:
    """SplitMix64 words ``start .. start+count-1`` of the stream for ``seed``."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _finalize(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * _GOLDEN)


def uniform_field(seed: int, shape: tuple[int, ...]) -> np.ndarray:
    """I.i.d. uniforms in [0, 1), one word per sample."""
    n = int(np.prod(shape))
    w = words(seed, 0, n)
    return ((w >> np.uint64(11)).astype(np.float64) / _TWO53).reshape(shape)


def normal_field(seed: int, shape: tuple[int, ...]) -> np.ndarray:
    """I.i.d. standard normals, two words per sample (Box-Muller).

    u1 is shifted into (0, 1] so the log never sees zero.
    """
    n = int(np.prod(shape))
    w = words(seed, 0, 2 * n)
    u1 = ((w[:n] >> np.uint64(11)).astype(np.float64) + 1.0) / _TWO53
    u2 = (w[n:] >> np.uint64(11)).astype(np.float64) / _TWO53
    z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
    return z.reshape(shape)


def derive_seed(base: int, *indices: int) -> int:
    """Stable sub-seed for a (run, image, attack, ...) coordinate tuple."""
    s = np.uint64(base & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        for i in indices:
            s = _finalize(s + (np.uint64(i & 0xFFFFFFFFFFFFFFFF) + np.uint64(1)) * _GOLDEN)
    return int(s)
