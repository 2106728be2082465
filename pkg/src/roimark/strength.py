"""Embedding map construction and per-sub-block strength factors.

Class masks weighted by their coefficients define where the image matters:
the embedding map is ``k_alpha * (1 - max_i(c_i * M_i))``, so strength drops
to zero inside fully-weighted objects and stays at ``k_alpha`` in free areas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .validation import BLOCK_SIZE, GRID_SIZE, check_k_alpha, check_mask


@dataclass(frozen=True)
class ClassMask:
    """One named class mask and its weighting coefficient in [0, 1]."""

    name: str
    mask: np.ndarray
    coefficient: float

    def __post_init__(self):
        if not 0.0 <= float(self.coefficient) <= 1.0:
            raise ValidationError(
                f"class {self.name!r} coefficient must lie in [0, 1], got {self.coefficient}"
            )
        object.__setattr__(self, "mask", check_mask(self.mask, name=f"mask {self.name!r}"))


def _weighted_support(classes, width: int, height: int) -> np.ndarray:
    """Pointwise max of c_i * M_i; zeros when no classes are given."""
    support = np.zeros((height, width), dtype=np.float64)
    for entry in classes:
        mask = check_mask(entry.mask, (height, width), name=f"mask {entry.name!r}")
        np.maximum(support, float(entry.coefficient) * mask, out=support)
    return support


def build_embedding_map(classes, k_alpha: float, width: int, height: int) -> np.ndarray:
    """Pointwise ``k_alpha * (1 - max_i c_i * M_i)`` over a width x height grid."""
    k = check_k_alpha(k_alpha)
    return k * (1.0 - _weighted_support(classes, width, height))


def subblock_strength(embedding_map: np.ndarray, footprint: tuple[int, int, int, int]) -> float:
    """Mean of the embedding map over a (top, left, height, width) rectangle."""
    m = np.asarray(embedding_map, dtype=np.float64)
    top, left, height, width = (int(v) for v in footprint)
    if height <= 0 or width <= 0:
        raise ValidationError("footprint must have positive size")
    if top < 0 or left < 0 or top + height > m.shape[0] or left + width > m.shape[1]:
        raise ValidationError(f"footprint {footprint} outside map of shape {m.shape}")
    return float(m[top : top + height, left : left + width].mean())


def roi_density_per_block(classes, width: int, height: int) -> np.ndarray:
    """Fraction of ROI pixels (weighted support > 0) per 128x128 block.

    Returns 16 values in row-major block order.  A class with coefficient 0
    contributes nothing, matching its absence from the embedding map.
    """
    if width % BLOCK_SIZE or height % BLOCK_SIZE:
        raise ValidationError(f"dimensions must be multiples of {BLOCK_SIZE}")
    support = _weighted_support(classes, width, height) > 0.0
    rows = height // BLOCK_SIZE
    cols = width // BLOCK_SIZE
    tiles = support.reshape(rows, BLOCK_SIZE, cols, BLOCK_SIZE)
    counts = tiles.sum(axis=(1, 3), dtype=np.int64)
    return (counts / float(BLOCK_SIZE * BLOCK_SIZE)).reshape(rows * cols)


def block_grid_shape() -> tuple[int, int]:
    return GRID_SIZE, GRID_SIZE
