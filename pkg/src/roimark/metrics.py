"""Fidelity and recovery-accuracy metrics.

All image metrics assume rasters on the [0, 1] scale.  Bit metrics take
flat or 2-D arrays of {0, 1}.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ValidationError
from .validation import check_raster


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    x = check_raster(a)
    y = check_raster(b)
    if x.shape != y.shape:
        raise ValidationError(f"shape mismatch: {x.shape} vs {y.shape}")
    return x, y


def mse(a, b) -> float:
    x, y = _pair(a, b)
    return float(np.mean((x - y) ** 2))


def psnr(a, b) -> float:
    """Peak signal-to-noise ratio in dB against peak value 1.

    Identical inputs yield +inf.
    """
    err = mse(a, b)
    if err == 0.0:
        return float("inf")
    return float(10.0 * np.log10(1.0 / err))


def _ssim_terms(x, y, c1: float, c2: float) -> np.ndarray:
    mx = x.mean(axis=(-2, -1))
    my = y.mean(axis=(-2, -1))
    vx = ((x - mx[..., None, None]) ** 2).mean(axis=(-2, -1))
    vy = ((y - my[..., None, None]) ** 2).mean(axis=(-2, -1))
    cov = ((x - mx[..., None, None]) * (y - my[..., None, None])).mean(axis=(-2, -1))
    num = (2.0 * mx * my + c1) * (2.0 * cov + c2)
    den = (mx * mx + my * my + c1) * (vx + vy + c2)
    return num / den


def ssim(a, b, *, window: int | None = 8) -> float:
    """Structural similarity with population statistics and L = 1.

    window=None compares the images as one global window; an integer w
    tiles both images with every w x w position (stride 1, no padding) and
    averages the per-window scores uniformly.  Stabilizers are
    c1 = (0.01 L)^2 and c2 = (0.03 L)^2.
    """
    x, y = _pair(a, b)
    c1 = 0.01 ** 2
    c2 = 0.03 ** 2
    if window is None:
        return float(_ssim_terms(x, y, c1, c2))
    w = int(window)
    h, wd = x.shape
    if not 1 <= w <= min(h, wd):
        raise ValidationError(f"window {window} does not fit raster {x.shape}")
    sw = np.lib.stride_tricks.sliding_window_view
    return float(_ssim_terms(sw(x, (w, w)), sw(y, (w, w)), c1, c2).mean())


def _bits(arr, name: str) -> np.ndarray:
    bits = np.asarray(arr)
    if bits.ndim not in (1, 2) or bits.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-D or 2-D bit array")
    if not np.isin(bits, (0, 1)).all():
        raise ValidationError(f"{name} must contain only 0 and 1")
    return bits.astype(np.float64).reshape(-1)


def ber(reference, recovered) -> float:
    """Bit error rate: fraction of positions where the bits disagree."""
    x = _bits(reference, "reference")
    y = _bits(recovered, "recovered")
    if x.shape != y.shape:
        raise ValidationError(f"bit count mismatch: {x.size} vs {y.size}")
    return float(np.mean(x != y))


def nc_literal(reference, recovered) -> float:
    """Mean of elementwise products of the two bit arrays.

    This follows the common printed definition; note a balanced pattern
    correlated with itself scores 0.5, not 1, because zero bits never
    contribute.  Use nc_normalized for a 1-means-identical score.
    """
    x = _bits(reference, "reference")
    y = _bits(recovered, "recovered")
    if x.shape != y.shape:
        raise ValidationError(f"bit count mismatch: {x.size} vs {y.size}")
    return float(np.mean(x * y))


def nc_normalized(reference, recovered) -> float:
    """Cross-correlation normalized by both bit-array energies.

    sum(x*y) / sqrt(sum(x^2) * sum(y^2)); equals 1 iff the one-positions
    coincide exactly.  Raises if either array is all zeros.
    """
    x = _bits(reference, "reference")
    y = _bits(recovered, "recovered")
    if x.shape != y.shape:
        raise ValidationError(f"bit count mismatch: {x.size} vs {y.size}")
    ex = float(np.sum(x * x))
    ey = float(np.sum(y * y))
    if ex == 0.0 or ey == 0.0:
        raise ValidationError("nc_normalized is undefined for an all-zero bit array")
    return float(np.sum(x * y) / np.sqrt(ex * ey))
