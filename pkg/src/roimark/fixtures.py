"""Deterministic synthetic test corpus.

Five 512x512 host images with distinct textures, plus two region masks
(a person-shaped and a car-shaped silhouette) laid out so at least five of
the sixteen 128x128 blocks stay completely mask-free.  Host intensities are
rescaled into [0.15, 0.85]; the margin keeps full-strength embedding away
from the clamp at 0 and 1.  Everything derives from fixed seeds.
"""

from __future__ import annotations

import os

import numpy as np

from . import rng
from .exceptions import ValidationError
from .io import resize_bilinear, save_image, save_logo, save_mask
from .validation import IMAGE_SIZE

FIXTURE_NAMES = ("gradient", "rings", "waves", "blobs", "field")
CLASS_NAMES = ("person", "car")

_LO, _HI = 0.15, 0.85


def _grid() -> tuple[np.ndarray, np.ndarray]:
    c = (np.arange(IMAGE_SIZE, dtype=np.float64) + 0.5) / IMAGE_SIZE
    return np.meshgrid(c, c, indexing="ij")


def _rescale(img: np.ndarray) -> np.ndarray:
    lo, hi = img.min(), img.max()
    if hi <= lo:
        raise ValidationError("fixture image is constant")
    return _LO + (_HI - _LO) * (img - lo) / (hi - lo)


def make_image(name: str) -> np.ndarray:
    """One deterministic 512x512 host raster in [0.15, 0.85]."""
    yy, xx = _grid()
    if name == "gradient":
        img = 0.6 * xx + 0.4 * yy + 0.08 * np.sin(12 * np.pi * xx) * np.sin(10 * np.pi * yy)
    elif name == "rings":
        r = np.hypot(yy - 0.5, xx - 0.5)
        img = np.sin(38.0 * np.pi * r) * np.exp(-2.2 * r) + 0.6 * r
    elif name == "waves":
        img = (
            np.sin(2 * np.pi * (3.0 * xx + 7.0 * yy))
            + 0.7 * np.sin(2 * np.pi * (9.0 * xx - 2.0 * yy))
            + 0.5 * np.sin(2 * np.pi * (5.0 * xx + 5.0 * yy) + 1.3)
        )
    elif name == "blobs":
        u = rng.uniform_field(0xB10B5, (6, 3))
        img = np.zeros((IMAGE_SIZE, IMAGE_SIZE))
        for cy, cx, w in u:
            sigma = 0.06 + 0.12 * w
            img += np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * sigma**2))
    elif name == "field":
        coarse = rng.normal_field(0xF1E1D, (32, 32))
        img = resize_bilinear(
            _LO + (_HI - _LO) * (coarse - coarse.min()) / np.ptp(coarse),
            IMAGE_SIZE,
            IMAGE_SIZE,
        )
    else:
        raise ValidationError(f"unknown fixture {name!r}")
    return _rescale(img)


def person_mask(center=(170.0, 150.0), scale: float = 80.0) -> np.ndarray:
    """Head-and-torso silhouette as a {0,1} raster."""
    yy, xx = np.meshgrid(
        np.arange(IMAGE_SIZE, dtype=np.float64),
        np.arange(IMAGE_SIZE, dtype=np.float64),
        indexing="ij",
    )
    cy, cx = center
    head = (yy - (cy - 1.05 * scale)) ** 2 + (xx - cx) ** 2 <= (0.55 * scale) ** 2
    torso = ((yy - cy) / (1.4 * scale)) ** 2 + ((xx - cx) / (0.8 * scale)) ** 2 <= 1.0
    return (head | torso).astype(np.float64)


def car_mask(center=(416.0, 384.0), scale: float = 80.0) -> np.ndarray:
    """Side-view car silhouette (body, cabin, two wheels) as {0,1}."""
    yy, xx = np.meshgrid(
        np.arange(IMAGE_SIZE, dtype=np.float64),
        np.arange(IMAGE_SIZE, dtype=np.float64),
        indexing="ij",
    )
    cy, cx = center
    body = (np.abs(yy - cy) <= 0.45 * scale) & (np.abs(xx - cx) <= 1.5 * scale)
    cabin = (
        (yy >= cy - 0.95 * scale)
        & (yy <= cy - 0.45 * scale)
        & (np.abs(xx - (cx - 0.2 * scale)) <= 0.7 * scale)
    )
    wheels = np.zeros_like(body)
    for side in (-1.0, 1.0):
        wheels |= (yy - (cy + 0.45 * scale)) ** 2 + (xx - (cx + side * 0.9 * scale)) ** 2 <= (
            0.3 * scale
        ) ** 2
    return (body | cabin | wheels).astype(np.float64)


def make_masks(name: str) -> dict[str, np.ndarray]:
    """Per-fixture masks; geometry varies a little with the fixture index."""
    if name not in FIXTURE_NAMES:
        raise ValidationError(f"unknown fixture {name!r}")
    i = FIXTURE_NAMES.index(name)
    s = 68.0 + 4.0 * i
    return {
        "person": person_mask(scale=s),
        "car": car_mask(scale=s),
    }


def default_logo() -> np.ndarray:
    return np.array(
        [
            [1, 0, 1, 0],
            [0, 1, 0, 1],
            [1, 1, 0, 0],
            [0, 0, 1, 1],
        ],
        dtype=np.uint8,
    )


def saturated_image() -> np.ndarray:
    """Host with true blacks and whites; exercises the output clamp."""
    yy, xx = _grid()
    img = np.clip(1.6 * xx - 0.3 + 0.1 * np.sin(8 * np.pi * yy), 0.0, 1.0)
    img[:64, :64] = 0.0
    img[-64:, -64:] = 1.0
    return img


def write_corpus(directory: str) -> dict[str, dict[str, str]]:
    """Write the full corpus as image/mask/logo files; return the path map."""
    os.makedirs(directory, exist_ok=True)
    manifest: dict[str, dict[str, str]] = {}
    for name in FIXTURE_NAMES:
        paths = {"image": os.path.join(directory, f"{name}.pgm")}
        save_image(make_image(name), paths["image"], depth=16)
        for cls, mask in make_masks(name).items():
            paths[cls] = os.path.join(directory, f"{name}_{cls}.pgm")
            save_mask(mask, paths[cls])
        manifest[name] = paths
    logo_path = os.path.join(directory, "logo.txt")
    save_logo(default_logo(), logo_path)
    manifest["logo"] = {"logo": logo_path}
    return manifest
