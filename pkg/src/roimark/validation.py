"""Input validation helpers used by the functional API and the estimators."""

from __future__ import annotations

import numpy as np

from .exceptions import ValidationError

# Geometry of the embedding pipeline: a 512x512 host is cut into a 4x4 grid
# of 128x128 blocks, of which 5 carry the payload.
IMAGE_SIZE = 512
BLOCK_SIZE = 128
GRID_SIZE = 4
NUM_BLOCKS = GRID_SIZE * GRID_SIZE
NUM_SELECTED = 5
LOGO_SIDE = 4
LOGO_BITS = LOGO_SIDE * LOGO_SIDE


def check_raster(x, name: str = "image") -> np.ndarray:
    """Coerce to a 2-D float64 array with every sample in [0, 1]."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValidationError(f"{name} contains non-finite samples")
    lo, hi = float(arr.min()), float(arr.max())
    if lo < 0.0 or hi > 1.0:
        raise ValidationError(f"{name} samples must lie in [0, 1], got range [{lo}, {hi}]")
    return arr


def check_host(x, name: str = "host") -> np.ndarray:
    """A raster with the exact pipeline geometry (512x512)."""
    arr = check_raster(x, name)
    if arr.shape != (IMAGE_SIZE, IMAGE_SIZE):
        raise ValidationError(
            f"{name} must be {IMAGE_SIZE}x{IMAGE_SIZE} (resize first), got {arr.shape}"
        )
    return arr


def check_mask(m, shape: tuple[int, int] | None = None, name: str = "mask") -> np.ndarray:
    """Coerce to a 2-D float64 mask with values in [0, 1].

    Binary masks are the common case but soft masks in [0, 1] are accepted;
    they combine with class coefficients the same way.
    """
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.isfinite(arr).all() or arr.min() < 0.0 or arr.max() > 1.0:
        raise ValidationError(f"{name} values must lie in [0, 1]")
    if shape is not None and arr.shape != tuple(shape):
        raise ValidationError(f"{name} shape {arr.shape} does not match expected {tuple(shape)}")
    return arr


def check_logo(bits, name: str = "logo") -> np.ndarray:
    """Coerce to a 4x4 uint8 array of {0,1} with eight zeros and eight ones."""
    arr = np.asarray(bits)
    if arr.shape == (LOGO_BITS,):
        arr = arr.reshape(LOGO_SIDE, LOGO_SIDE)
    if arr.shape != (LOGO_SIDE, LOGO_SIDE):
        raise ValidationError(f"{name} must be 4x4 (or 16 flat bits), got shape {arr.shape}")
    arr = arr.astype(np.float64)
    if not np.isin(arr, (0.0, 1.0)).all():
        raise ValidationError(f"{name} must contain only 0/1 values")
    ones = int(arr.sum())
    if ones != LOGO_BITS // 2:
        raise ValidationError(f"{name} must be balanced (8 ones of 16), got {ones} ones")
    return arr.astype(np.uint8)


def check_block_index(index: int, name: str = "block index") -> int:
    idx = int(index)
    if not 0 <= idx < NUM_BLOCKS:
        raise ValidationError(f"{name} {idx} outside the {GRID_SIZE}x{GRID_SIZE} block grid")
    return idx


def check_k_alpha(value: float) -> float:
    k = float(value)
    if not 0.0 < k <= 1.0:
        raise ValidationError(f"k_alpha must lie in (0, 1], got {k}")
    return k


def check_positive(value: float, name: str) -> float:
    v = float(value)
    if not v > 0.0:
        raise ValidationError(f"{name} must be > 0, got {v}")
    return v
