"""Deterministic image attacks used to stress watermarked rasters.

Five attacks: additive Gaussian noise, salt & pepper noise, 3x3 median
filtering, histogram equalization and a simulated JPEG round trip.  The
stochastic ones draw per-pixel randomness from the counter-based stream in
:mod:`roimark.rng`, so identical (seed, parameters) give identical rasters
on every platform and under any parallel schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import rng
from .exceptions import ValidationError
from .transforms import dct2, idct2
from .validation import check_raster

DEFAULT_SP_DENSITY = 0.05  # tooling convention, configurable

KINDS = ("gaussian", "salt_pepper", "median3", "histeq", "jpeg")

# Baseline JPEG luminance quantization table (8x8, row-major).
JPEG_LUMA_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)


def gaussian_noise(raster, variance: float, seed: int) -> np.ndarray:
    """Add zero-mean Gaussian noise of the given [0,1]-scale variance, clamp."""
    img = check_raster(raster)
    if not variance > 0:
        raise ValidationError(f"variance must be > 0, got {variance}")
    noise = rng.normal_field(seed, img.shape) * np.sqrt(variance)
    return np.clip(img + noise, 0.0, 1.0)


def salt_pepper(raster, density: float, seed: int) -> np.ndarray:
    """Replace each pixel with 0 or 1 (equal odds) with probability density."""
    img = check_raster(raster)
    if not 0.0 < density <= 1.0:
        raise ValidationError(f"density must lie in (0, 1], got {density}")
    u = rng.uniform_field(seed, img.shape)
    out = img.copy()
    out[u < density / 2.0] = 0.0
    out[(u >= density / 2.0) & (u < density)] = 1.0
    return out


def median3(raster) -> np.ndarray:
    """3x3 median filter with edge replication at the borders."""
    img = check_raster(raster)
    padded = np.pad(img, 1, mode="edge")
    h, w = img.shape
    stack = np.empty((9, h, w), dtype=np.float64)
    k = 0
    for dy in range(3):
        for dx in range(3):
            stack[k] = padded[dy : dy + h, dx : dx + w]
            k += 1
    return np.median(stack, axis=0)


def hist_eq(raster) -> np.ndarray:
    """Histogram equalization over 256 equal-width bins.

    Each pixel maps to the normalized cumulative histogram of its bin, a
    monotone non-decreasing mapping into (0, 1].
    """
    img = check_raster(raster)
    levels = np.minimum((img * 256.0).astype(np.int64), 255)
    hist = np.bincount(levels.reshape(-1), minlength=256)
    cdf = np.cumsum(hist) / float(img.size)
    return cdf[levels]


def jpeg_quant_table(quality: int) -> np.ndarray:
    """Luminance table scaled by the 1..100 quality setting.

    scale = 5000/Q below 50, else 200 - 2Q; entries floor((q*scale+50)/100),
    clamped to [1, 255].  Quality 50 reproduces the base table.
    """
    q = int(quality)
    if not 1 <= q <= 100:
        raise ValidationError(f"quality must lie in 1..100, got {quality}")
    scale = 5000.0 / q if q < 50 else 200.0 - 2.0 * q
    table = np.floor((JPEG_LUMA_TABLE * scale + 50.0) / 100.0)
    return np.clip(table, 1.0, 255.0)


def jpeg_sim(raster, quality: int) -> np.ndarray:
    """Baseline-JPEG luminance distortion: blockwise DCT quantization.

    Entropy coding is lossless and therefore skipped; the image is scaled to
    [0,255], level-shifted by 128, transformed per 8x8 block, quantized with
    the scaled table, dequantized and reassembled.
    """
    img = check_raster(raster)
    h, w = img.shape
    if h % 8 or w % 8:
        raise ValidationError(f"jpeg_sim needs dimensions divisible by 8, got {img.shape}")
    table = jpeg_quant_table(quality)
    blocks = img.reshape(h // 8, 8, w // 8, 8).transpose(0, 2, 1, 3) * 255.0 - 128.0
    coeffs = dct2(blocks)
    coeffs = np.rint(coeffs / table) * table
    spatial = idct2(coeffs).transpose(0, 2, 1, 3).reshape(h, w)
    return np.clip((spatial + 128.0) / 255.0, 0.0, 1.0)


# ---------------------------------------------------------------------------
# transformer wrappers

class _ImageAttack(TransformerMixin, BaseEstimator):
    """Stateless raster-to-raster transformer; fit only validates."""

    def fit(self, X, y=None):
        check_raster(X)
        return self

    def __sklearn_is_fitted__(self) -> bool:
        # stateless: nothing is learned, transform works without fit
        return True

    def transform(self, X) -> np.ndarray:
        raise NotImplementedError


class GaussianNoise(_ImageAttack):
    def __init__(self, variance: float = 0.01, seed: int = 0):
        self.variance = variance
        self.seed = seed

    def transform(self, X):
        return gaussian_noise(X, self.variance, self.seed)


class SaltPepperNoise(_ImageAttack):
    def __init__(self, density: float = DEFAULT_SP_DENSITY, seed: int = 0):
        self.density = density
        self.seed = seed

    def transform(self, X):
        return salt_pepper(X, self.density, self.seed)


class MedianFilter(_ImageAttack):
    def transform(self, X):
        return median3(X)


class HistogramEqualization(_ImageAttack):
    def transform(self, X):
        return hist_eq(X)


class JpegCompression(_ImageAttack):
    def __init__(self, quality: int = 90):
        self.quality = quality

    def transform(self, X):
        return jpeg_sim(X, self.quality)


# ---------------------------------------------------------------------------
# config-level attack descriptions

@dataclass(frozen=True)
class AttackSpec:
    """One attack with its parameters; the benchmark/CLI currency."""

    kind: str
    variance: float | None = None
    density: float | None = None
    quality: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown attack kind {self.kind!r} (want one of {KINDS})")
        needed = {"gaussian": "variance", "salt_pepper": "density", "jpeg": "quality"}.get(self.kind)
        for param in ("variance", "density", "quality"):
            value = getattr(self, param)
            if param == needed:
                if value is None:
                    raise ValidationError(f"attack {self.kind!r} needs --{param}")
            elif value is not None:
                raise ValidationError(f"attack {self.kind!r} does not take --{param}")
        if self.kind == "gaussian" and not self.variance > 0:
            raise ValidationError(f"variance must be > 0, got {self.variance}")
        if self.kind == "salt_pepper" and not 0.0 < self.density <= 1.0:
            raise ValidationError(f"density must lie in (0, 1], got {self.density}")
        if self.kind == "jpeg" and not 1 <= int(self.quality) <= 100:
            raise ValidationError(f"quality must lie in 1..100, got {self.quality}")

    def label(self) -> str:
        """Canonical spec string, also accepted by parse_attack_spec."""
        if self.kind == "gaussian":
            return f"gaussian:variance={self.variance:g}"
        if self.kind == "salt_pepper":
            return f"salt_pepper:density={self.density:g}"
        if self.kind == "jpeg":
            return f"jpeg:quality={int(self.quality)}"
        return self.kind

    def with_seed(self, seed: int) -> "AttackSpec":
        return replace(self, seed=int(seed))


def parse_attack_spec(text: str) -> AttackSpec:
    """Parse ``kind[:key=value[,key=value...]]``, e.g. ``gaussian:variance=0.01``."""
    kind, _, rest = text.strip().partition(":")
    fields: dict[str, object] = {}
    if rest:
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in ("variance", "density", "quality", "seed"):
                raise ValidationError(f"malformed attack parameter {item!r} in {text!r}")
            try:
                fields[key] = int(value) if key in ("quality", "seed") else float(value)
            except ValueError as exc:
                raise ValidationError(f"malformed attack parameter {item!r} in {text!r}") from exc
    return AttackSpec(kind=kind, **fields)


def apply_attack(raster, spec: AttackSpec) -> np.ndarray:
    if spec.kind == "gaussian":
        return gaussian_noise(raster, spec.variance, spec.seed)
    if spec.kind == "salt_pepper":
        return salt_pepper(raster, spec.density, spec.seed)
    if spec.kind == "median3":
        return median3(raster)
    if spec.kind == "histeq":
        return hist_eq(raster)
    return jpeg_sim(raster, spec.quality)


def table1_specs(sp_density: float = DEFAULT_SP_DENSITY) -> tuple[AttackSpec, ...]:
    """The benchmark attack battery in report row order.

    Seeds of the stochastic rows are assigned by the benchmark runner.
    """
    return (
        AttackSpec("gaussian", variance=0.01),
        AttackSpec("gaussian", variance=0.02),
        AttackSpec("gaussian", variance=0.03),
        AttackSpec("jpeg", quality=90),
        AttackSpec("jpeg", quality=80),
        AttackSpec("jpeg", quality=70),
        AttackSpec("median3"),
        AttackSpec("histeq"),
        AttackSpec("salt_pepper", density=sp_density),
    )
