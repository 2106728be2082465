"""Blind watermark codec: block selection, slotting, coefficient-pair coding.

Embedding walks the five lowest-ROI 128x128 blocks, takes a two-level Haar
transform of each, cuts the level-2 detail subbands (LH2, HL2, HH2, 32x32
each) into 8x8 sub-blocks and encodes one logo bit per sub-block as the sign
of the difference between two mid-frequency DCT coefficients.  5 blocks x 3
subbands x 16 sub-blocks = 240 slots, so every one of the 16 logo bits lands
in exactly 15 slots and extraction decides each bit by majority vote.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import rng
from .exceptions import ValidationError
from .strength import ClassMask, build_embedding_map, roi_density_per_block
from .transforms import PAIR_A, PAIR_B, dct2, dwt2_two_level, idct2, idwt2_two_level
from .validation import (
    BLOCK_SIZE,
    GRID_SIZE,
    IMAGE_SIZE,
    LOGO_BITS,
    LOGO_SIDE,
    NUM_BLOCKS,
    NUM_SELECTED,
    check_host,
    check_k_alpha,
    check_logo,
    check_positive,
    check_raster,
)

BANDS = ("LH2", "HL2", "HH2")
SUBGRID = 4  # each 32x32 subband holds 4x4 sub-blocks of 8x8
SLOTS_PER_BAND = SUBGRID * SUBGRID
SLOTS_PER_BLOCK = len(BANDS) * SLOTS_PER_BAND
NUM_SLOTS = NUM_SELECTED * SLOTS_PER_BLOCK
VOTES_PER_BIT = NUM_SLOTS // LOGO_BITS
# One level-2 coefficient spans 4x4 pixels, so an 8x8 sub-block covers a
# 32x32 spatial footprint of its block.
FOOTPRINT = BLOCK_SIZE // SUBGRID

# Defaults for the CLI and benchmarks.  The floor keeps sub-blocks that sit
# fully inside ROI masks decodable after 8-bit quantization; the default
# scale is the operating point where the heaviest benchmark noise
# (Gaussian, variance 0.03) still decodes with zero bit errors while the
# watermarked image stays above 40 dB PSNR.
DEFAULT_K_ALPHA = 0.4
DEFAULT_STRENGTH_FLOOR = 0.05


class Slot(NamedTuple):
    block_ordinal: int
    band: str
    subrow: int
    subcol: int
    bit_index: int


@dataclass(frozen=True)
class SideInfo:
    """Everything blind extraction needs, stored beside the watermarked image."""

    blocks: tuple[int, ...]
    k_alpha: float
    strength_floor: float
    classes: tuple[tuple[str, float], ...] = ()
    logo_shape: tuple[int, int] = (LOGO_SIDE, LOGO_SIDE)
    version: int = 1

    def validate(self) -> None:
        if len(self.blocks) != NUM_SELECTED or len(set(self.blocks)) != NUM_SELECTED:
            raise ValidationError(f"side info needs {NUM_SELECTED} distinct block indices")
        for b in self.blocks:
            if not 0 <= int(b) < NUM_BLOCKS:
                raise ValidationError(f"block index {b} outside the {GRID_SIZE}x{GRID_SIZE} grid")
        check_k_alpha(self.k_alpha)
        check_positive(self.strength_floor, "strength_floor")
        for name, coeff in self.classes:
            if not name or any(ch in name for ch in ",:=\n"):
                raise ValidationError(f"invalid class name {name!r}")
            if not 0.0 <= float(coeff) <= 1.0:
                raise ValidationError(f"class {name!r} coefficient outside [0, 1]")
        if tuple(self.logo_shape) != (LOGO_SIDE, LOGO_SIDE):
            raise ValidationError(f"unsupported logo shape {self.logo_shape}")


def select_blocks(densities) -> tuple[int, ...]:
    """Indices of the 5 lowest-density blocks, ties broken by raster order."""
    d = np.asarray(densities, dtype=np.float64)
    if d.shape != (NUM_BLOCKS,):
        raise ValidationError(f"expected {NUM_BLOCKS} densities, got shape {d.shape}")
    order = sorted(range(NUM_BLOCKS), key=lambda i: (d[i], i))
    return tuple(order[:NUM_SELECTED])


def make_slot_plan(blocks) -> tuple[Slot, ...]:
    """Deterministic slot enumeration; slot s carries logo bit s mod 16."""
    blocks = tuple(int(b) for b in blocks)
    SideInfo(blocks=blocks, k_alpha=1.0, strength_floor=1.0).validate()
    plan = []
    s = 0
    for ordinal in range(NUM_SELECTED):
        for band in BANDS:
            for subrow in range(SUBGRID):
                for subcol in range(SUBGRID):
                    plan.append(Slot(ordinal, band, subrow, subcol, s % LOGO_BITS))
                    s += 1
    return tuple(plan)


def embed_bit(coeffs: np.ndarray, bit, strength) -> np.ndarray:
    """Order the coefficient pair to encode ``bit`` with a gap >= strength.

    The pair is re-centered symmetrically about its mean and the gap is
    max(existing gap, strength), so an already-correct pair with a wide
    enough gap is returned untouched.  Accepts stacked (..., 8, 8) inputs
    with broadcast bit/strength.
    """
    c = np.array(coeffs, dtype=np.float64)
    bit = np.asarray(bit)
    strength = np.asarray(strength, dtype=np.float64)
    if (strength < 0).any():
        raise ValidationError("strength must be >= 0")
    a = c[..., PAIR_A[0], PAIR_A[1]]
    b = c[..., PAIR_B[0], PAIR_B[1]]
    mean = (a + b) / 2.0
    gap = np.maximum(np.abs(a - b), strength)
    hi = mean + gap / 2.0
    lo = mean - gap / 2.0
    want_one = bit == 1
    new_a = np.where(want_one, hi, lo)
    new_b = np.where(want_one, lo, hi)
    ordered = np.where(want_one, a > b, a < b)
    keep = ordered & (np.abs(a - b) >= strength)
    c[..., PAIR_A[0], PAIR_A[1]] = np.where(keep, a, new_a)
    c[..., PAIR_B[0], PAIR_B[1]] = np.where(keep, b, new_b)
    return c


def extract_bit(coeffs: np.ndarray):
    """1 where the pair is ordered high-to-low, else 0 (ties decode as 0)."""
    c = np.asarray(coeffs, dtype=np.float64)
    a = c[..., PAIR_A[0], PAIR_A[1]]
    b = c[..., PAIR_B[0], PAIR_B[1]]
    out = (a > b).astype(np.uint8)
    return out if out.ndim else int(out)


def _split_subblocks(band: np.ndarray) -> np.ndarray:
    """(32, 32) subband -> (4, 4, 8, 8) sub-block stack."""
    side = SUBGRID * 8
    if band.shape != (side, side):
        raise ValidationError(f"level-2 subband must be {side}x{side}, got {band.shape}")
    return band.reshape(SUBGRID, 8, SUBGRID, 8).transpose(0, 2, 1, 3)


def _join_subblocks(subs: np.ndarray) -> np.ndarray:
    return subs.transpose(0, 2, 1, 3).reshape(SUBGRID * 8, SUBGRID * 8)


def plan_embedding(classes, k_alpha: float):
    """Mask-derived state shared by fit and transform: map, densities, blocks."""
    k = check_k_alpha(k_alpha)
    classes = tuple(classes)
    emap = build_embedding_map(classes, k, IMAGE_SIZE, IMAGE_SIZE)
    densities = roi_density_per_block(classes, IMAGE_SIZE, IMAGE_SIZE)
    blocks = select_blocks(densities)
    return emap, densities, blocks


def _block_region(index: int) -> tuple[slice, slice]:
    row, col = divmod(int(index), GRID_SIZE)
    return (
        slice(row * BLOCK_SIZE, (row + 1) * BLOCK_SIZE),
        slice(col * BLOCK_SIZE, (col + 1) * BLOCK_SIZE),
    )


def _block_strengths(emap: np.ndarray, index: int, floor: float) -> np.ndarray:
    """4x4 strength factors: mean embedding map over each 32x32 footprint."""
    rows, cols = _block_region(index)
    tile = emap[rows, cols].reshape(SUBGRID, FOOTPRINT, SUBGRID, FOOTPRINT)
    return np.maximum(tile.mean(axis=(1, 3)), floor)


def _embed_into(host: np.ndarray, logo: np.ndarray, emap: np.ndarray, blocks, floor: float) -> np.ndarray:
    out = host.copy()
    for index in blocks:
        rows, cols = _block_region(index)
        strengths = _block_strengths(emap, index, floor)
        pyramid = dwt2_two_level(out[rows, cols])
        for band in pyramid.level2_details():
            subs = _split_subblocks(band)
            coded = idct2(embed_bit(dct2(subs), logo, strengths))
            band[:, :] = _join_subblocks(coded)
        out[rows, cols] = idwt2_two_level(pyramid)
    np.clip(out, 0.0, 1.0, out=out)
    return out


def embed(host, logo, *, k_alpha: float = DEFAULT_K_ALPHA, classes=(),
          strength_floor: float = DEFAULT_STRENGTH_FLOOR) -> tuple[np.ndarray, SideInfo]:
    """Watermark a 512x512 host; returns (watermarked, side info).

    The caller resizes beforehand; masks must match the host size.
    """
    host = check_host(host)
    logo = check_logo(logo)
    floor = check_positive(strength_floor, "strength_floor")
    emap, _, blocks = plan_embedding(classes, k_alpha)
    out = _embed_into(host, logo, emap, blocks, floor)
    side = SideInfo(
        blocks=blocks,
        k_alpha=float(k_alpha),
        strength_floor=floor,
        classes=tuple((c.name, float(c.coefficient)) for c in classes),
    )
    return out, side


def extract(watermarked, side: SideInfo) -> tuple[np.ndarray, np.ndarray]:
    """Blind extraction: majority-voted 4x4 logo plus the 240 raw slot bits."""
    image = check_raster(watermarked, "watermarked image")
    if image.shape != (IMAGE_SIZE, IMAGE_SIZE):
        raise ValidationError(f"watermarked image must be {IMAGE_SIZE}x{IMAGE_SIZE}")
    side.validate()
    raw = np.empty(NUM_SLOTS, dtype=np.uint8)
    votes = np.zeros((LOGO_SIDE, LOGO_SIDE), dtype=np.int64)
    pos = 0
    for index in side.blocks:
        rows, cols = _block_region(index)
        pyramid = dwt2_two_level(image[rows, cols])
        for band in pyramid.level2_details():
            bits = extract_bit(dct2(_split_subblocks(band)))
            raw[pos : pos + SLOTS_PER_BAND] = bits.reshape(-1)
            votes += bits
            pos += SLOTS_PER_BAND
    logo = (votes * 2 > VOTES_PER_BIT).astype(np.uint8)
    return logo, raw


def random_logo(seed: int) -> np.ndarray:
    """Deterministic balanced 4x4 logo: 8 ones placed by a seeded shuffle."""
    order = np.argsort(rng.words(seed, 0, LOGO_BITS), kind="stable")
    bits = np.zeros(LOGO_BITS, dtype=np.uint8)
    bits[order[: LOGO_BITS // 2]] = 1
    return bits.reshape(LOGO_SIDE, LOGO_SIDE)


# ---------------------------------------------------------------------------
# estimator wrappers

class WatermarkEmbedder(TransformerMixin, BaseEstimator):
    """Transformer that embeds a fixed logo into 512x512 rasters.

    ``fit`` derives the mask-dependent state (embedding map, ROI densities,
    selected blocks, side info); ``transform`` produces the watermarked
    image.  Parameters follow the scikit-learn convention: stored untouched
    at construction, validated at fit time.
    """

    def __init__(self, logo=None, k_alpha: float = DEFAULT_K_ALPHA, classes=(),
                 strength_floor: float = DEFAULT_STRENGTH_FLOOR):
        self.logo = logo
        self.k_alpha = k_alpha
        self.classes = classes
        self.strength_floor = strength_floor

    def fit(self, X, y=None):
        check_host(X)
        if self.logo is None:
            raise ValidationError("WatermarkEmbedder needs a logo")
        self._logo = check_logo(self.logo)
        self._floor = check_positive(self.strength_floor, "strength_floor")
        classes = tuple(self.classes)
        self.embedding_map_, self.densities_, self.blocks_ = plan_embedding(classes, self.k_alpha)
        self.side_info_ = SideInfo(
            blocks=self.blocks_,
            k_alpha=float(self.k_alpha),
            strength_floor=self._floor,
            classes=tuple((c.name, float(c.coefficient)) for c in classes),
        )
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "side_info_"):
            raise NotFittedError("WatermarkEmbedder is not fitted; call fit first")
        host = check_host(X)
        return _embed_into(host, self._logo, self.embedding_map_, self.blocks_, self._floor)


class WatermarkExtractor(BaseEstimator):
    """Blind decoder for rasters produced by :class:`WatermarkEmbedder`."""

    def __init__(self, side_info: SideInfo | None = None):
        self.side_info = side_info

    def _side(self) -> SideInfo:
        if self.side_info is None:
            raise ValidationError("WatermarkExtractor needs side_info")
        self.side_info.validate()
        return self.side_info

    def fit(self, X=None, y=None):
        self._side()
        return self

    def predict(self, X) -> np.ndarray:
        logo, _ = extract(X, self._side())
        return logo

    def extract(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Logo plus raw per-slot bits, in slot-plan order."""
        return extract(X, self._side())
