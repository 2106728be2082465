"""Orthonormal 2-D Haar DWT and 8x8 DCT-II kernels with exact inverses.

Both transforms are orthonormal, so they preserve energy and invert to within
floating-point round-off.  All functions accept stacked inputs: the transform
acts on the trailing two axes, any leading axes are batch dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError

DCT_SIZE = 8

# Mid-frequency coefficient pair carrying one payload bit per 8x8 sub-block,
# zero-based matrix positions (row 5, col 6) and (row 6, col 5).
PAIR_A = (5, 6)
PAIR_B = (6, 5)


def _dct_matrix(n: int) -> np.ndarray:
    k = np.arange(n)[:, None]
    x = np.arange(n)[None, :]
    mat = np.cos(np.pi * (2 * x + 1) * k / (2 * n))
    mat *= np.sqrt(2.0 / n)
    mat[0] = np.sqrt(1.0 / n)
    return mat


_DCT8 = _dct_matrix(DCT_SIZE)


def dwt2(block: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """One orthonormal Haar analysis step -> (LL, LH, HL, HH).

    For each 2x2 tile {a,b;c,d}: LL=(a+b+c+d)/2, LH=(a+c-b-d)/2 (horizontal
    detail), HL=(a+b-c-d)/2 (vertical detail), HH=(a-b-c+d)/2.
    """
    x = np.asarray(block, dtype=np.float64)
    if x.ndim < 2 or x.shape[-2] % 2 or x.shape[-1] % 2:
        raise ValidationError(f"dwt2 needs even side lengths, got shape {x.shape}")
    a = x[..., 0::2, 0::2]
    b = x[..., 0::2, 1::2]
    c = x[..., 1::2, 0::2]
    d = x[..., 1::2, 1::2]
    ll = (a + b + c + d) / 2.0
    lh = (a + c - b - d) / 2.0
    hl = (a + b - c - d) / 2.0
    hh = (a - b - c + d) / 2.0
    return ll, lh, hl, hh


def idwt2(ll, lh, hl, hh) -> np.ndarray:
    """Exact inverse of :func:`dwt2`."""
    ll, lh, hl, hh = (np.asarray(s, dtype=np.float64) for s in (ll, lh, hl, hh))
    if not (ll.shape == lh.shape == hl.shape == hh.shape):
        raise ValidationError("subband shapes must match")
    a = (ll + lh + hl + hh) / 2.0
    b = (ll - lh + hl - hh) / 2.0
    c = (ll + lh - hl - hh) / 2.0
    d = (ll - lh - hl + hh) / 2.0
    out = np.empty(ll.shape[:-2] + (ll.shape[-2] * 2, ll.shape[-1] * 2), dtype=np.float64)
    out[..., 0::2, 0::2] = a
    out[..., 0::2, 1::2] = b
    out[..., 1::2, 0::2] = c
    out[..., 1::2, 1::2] = d
    return out


@dataclass
class SubbandPyramid:
    """Two-level Haar decomposition; level 2 re-decomposes the level-1 LL."""

    lh1: np.ndarray
    hl1: np.ndarray
    hh1: np.ndarray
    ll2: np.ndarray
    lh2: np.ndarray
    hl2: np.ndarray
    hh2: np.ndarray

    def level2_details(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.lh2, self.hl2, self.hh2


def dwt2_two_level(block: np.ndarray) -> SubbandPyramid:
    x = np.asarray(block, dtype=np.float64)
    if x.shape[-2] % 4 or x.shape[-1] % 4:
        raise ValidationError(f"two-level DWT needs sides divisible by 4, got {x.shape}")
    ll1, lh1, hl1, hh1 = dwt2(x)
    ll2, lh2, hl2, hh2 = dwt2(ll1)
    return SubbandPyramid(lh1, hl1, hh1, ll2, lh2, hl2, hh2)


def idwt2_two_level(p: SubbandPyramid) -> np.ndarray:
    ll1 = idwt2(p.ll2, p.lh2, p.hl2, p.hh2)
    return idwt2(ll1, p.lh1, p.hl1, p.hh1)


def dct2(spatial: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D DCT-II of 8x8 tiles (trailing axes)."""
    x = np.asarray(spatial, dtype=np.float64)
    if x.shape[-2:] != (DCT_SIZE, DCT_SIZE):
        raise ValidationError(f"dct2 expects trailing {DCT_SIZE}x{DCT_SIZE}, got {x.shape}")
    return _DCT8 @ x @ _DCT8.T


def idct2(coeffs: np.ndarray) -> np.ndarray:
    c = np.asarray(coeffs, dtype=np.float64)
    if c.shape[-2:] != (DCT_SIZE, DCT_SIZE):
        raise ValidationError(f"idct2 expects trailing {DCT_SIZE}x{DCT_SIZE}, got {c.shape}")
    return _DCT8.T @ c @ _DCT8
