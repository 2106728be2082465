"""Bit-exact file I/O: PGM/PPM rasters, binary masks, logo text, side info.

Images travel as binary netpbm files (P5 grayscale at 8 or 16 bit, P6 color
at 8 bit) because they are trivially bit-exact and dependency-free.  In
memory every raster is a float64 array in [0, 1]; quantization happens only
at save time.  16-bit samples are big-endian, per the netpbm convention.
"""

from __future__ import annotations

import numpy as np

from .exceptions import FormatError, ValidationError
from .validation import (
    LOGO_SIDE,
    NUM_SELECTED,
    check_block_index,
    check_k_alpha,
    check_logo,
    check_positive,
    check_raster,
)

# ITU-R BT.601 luma weights for P6 color input.
_LUMA = (0.299, 0.587, 0.114)

SIDEINFO_VERSION = 1
_SIDEINFO_KEYS = (
    "version",
    "blocks",
    "k_alpha",
    "strength_floor",
    "classes",
    "logo_rows",
    "logo_cols",
)


# ---------------------------------------------------------------------------
# netpbm parsing

def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Next header token, skipping whitespace and '#' comment lines."""
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise FormatError("truncated netpbm header")
    return data[start:pos], pos


def _parse_header(data: bytes) -> tuple[bytes, int, int, int, int]:
    magic, pos = _read_token(data, 0)
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"unsupported netpbm magic {magic!r} (want P5 or P6)")
    fields = []
    for _ in range(3):
        tok, pos = _read_token(data, pos)
        if not tok.isdigit():
            raise FormatError(f"malformed netpbm header token {tok!r}")
        fields.append(int(tok))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise FormatError(f"invalid dimensions {width}x{height}")
    if maxval not in (255, 65535):
        raise FormatError(f"unsupported maxval {maxval} (want 255 or 65535)")
    # exactly one whitespace byte separates the header from the samples
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise FormatError("missing separator after netpbm header")
    return magic, width, height, maxval, pos + 1


def load_image(path) -> np.ndarray:
    """Load a P5 (8/16-bit) or P6 (8-bit) file as a [0, 1] float raster.

    Color input is converted to luma with BT.601 weights before normalizing.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    magic, width, height, maxval, pos = _parse_header(data)
    if magic == b"P6":
        if maxval != 255:
            raise FormatError("16-bit P6 input is not supported")
        expected = width * height * 3
        raw = np.frombuffer(data, dtype=np.uint8, count=-1, offset=pos)
        if raw.size < expected:
            raise FormatError("P6 sample data shorter than header promises")
        rgb = raw[:expected].reshape(height, width, 3).astype(np.float64)
        gray = _LUMA[0] * rgb[..., 0] + _LUMA[1] * rgb[..., 1] + _LUMA[2] * rgb[..., 2]
        return gray / 255.0
    dtype = np.uint8 if maxval == 255 else np.dtype(">u2")
    expected = width * height
    raw = np.frombuffer(data, dtype=dtype, count=-1, offset=pos)
    if raw.size < expected:
        raise FormatError("P5 sample data shorter than header promises")
    return raw[:expected].reshape(height, width).astype(np.float64) / maxval


def save_image(raster, path, depth: int = 8, comment: str | None = None) -> None:
    """Quantize to 8 or 16 bit (round, ties to even) and write binary P5."""
    arr = check_raster(raster)
    if depth not in (8, 16):
        raise ValidationError(f"depth must be 8 or 16, got {depth}")
    maxval = 255 if depth == 8 else 65535
    q = np.clip(np.rint(arr * maxval), 0, maxval)
    samples = q.astype(np.uint8 if depth == 8 else np.dtype(">u2"))
    height, width = arr.shape
    header = f"P5\n"
    if comment:
        header += "".join(f"# {line}\n" for line in comment.splitlines())
    header += f"{width} {height}\n{maxval}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(samples.tobytes())


def load_mask(path) -> np.ndarray:
    """Load an 8-bit P5 file as a strict {0,1} mask (threshold at 128)."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic, width, height, maxval, pos = _parse_header(data)
    if magic != b"P5" or maxval != 255:
        raise FormatError("masks must be 8-bit P5 files")
    raw = np.frombuffer(data, dtype=np.uint8, count=-1, offset=pos)
    if raw.size < width * height:
        raise FormatError("mask sample data shorter than header promises")
    return (raw[: width * height].reshape(height, width) >= 128).astype(np.float64)


def save_mask(mask, path, comment: str | None = None) -> None:
    arr = np.asarray(mask, dtype=np.float64)
    save_image(arr, path, depth=8, comment=comment)


def resize_bilinear(raster, width: int, height: int) -> np.ndarray:
    """Bilinear resample with half-pixel-centered sampling.

    Destination pixel centers map to source coordinates
    ``(i + 0.5) * src/dst - 0.5``, clamped at the borders; an identity-size
    resize reproduces the input exactly.
    """
    arr = check_raster(raster, "image")
    if width < 1 or height < 1:
        raise ValidationError("target dimensions must be >= 1")
    src_h, src_w = arr.shape

    def _axis(dst: int, src: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        pos = (np.arange(dst, dtype=np.float64) + 0.5) * (src / dst) - 0.5
        pos = np.clip(pos, 0.0, src - 1.0)
        lo = np.floor(pos).astype(np.intp)
        hi = np.minimum(lo + 1, src - 1)
        return lo, hi, pos - lo

    y0, y1, wy = _axis(height, src_h)
    x0, x1, wx = _axis(width, src_w)
    wy = wy[:, None]
    wx = wx[None, :]
    top = arr[np.ix_(y0, x0)] * (1.0 - wx) + arr[np.ix_(y0, x1)] * wx
    bot = arr[np.ix_(y1, x0)] * (1.0 - wx) + arr[np.ix_(y1, x1)] * wx
    out = top * (1.0 - wy) + bot * wy
    return np.clip(out, 0.0, 1.0)


# ---------------------------------------------------------------------------
# logo text format: 4 lines of 4 characters from {0,1}

def load_logo(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) != LOGO_SIDE or any(len(ln) != LOGO_SIDE for ln in lines):
        raise ValidationError(f"logo file must hold {LOGO_SIDE} lines of {LOGO_SIDE} characters")
    if any(ch not in "01" for ln in lines for ch in ln):
        raise ValidationError("logo file may contain only '0' and '1'")
    bits = np.array([[int(ch) for ch in ln] for ln in lines], dtype=np.uint8)
    return check_logo(bits)


def save_logo(bits, path, comment: str | None = None) -> None:
    logo = check_logo(bits)
    head = "".join(f"# {line}\n" for line in comment.splitlines()) if comment else ""
    text = "\n".join("".join(str(int(b)) for b in row) for row in logo) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(head + text)


# ---------------------------------------------------------------------------
# side-information file: line-oriented key=value text

def _format_float(x: float) -> str:
    return repr(float(x))


def read_keyvalues(path) -> dict:
    """Parse a key=value text file; '#' comment lines and blanks are skipped.

    The side-info files and the mask manifests share this format.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"line {lineno} is not key=value: {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if key in pairs:
            raise ValidationError(f"duplicate key {key!r}")
        pairs[key] = value.strip()
    return pairs


def write_keyvalues(pairs, path, comment: str | None = None) -> None:
    """Write key=value lines, optionally preceded by '#' comment lines."""
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.extend(f"{key}={value}" for key, value in pairs)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sideinfo(side, path, comment: str | None = None) -> None:
    """Write side info as `key=value` lines (fixed key order, '#' comments)."""
    from .codec import SideInfo  # deferred to avoid an import cycle

    if not isinstance(side, SideInfo):
        raise ValidationError("write_sideinfo expects a SideInfo instance")
    side.validate()
    write_keyvalues(
        [
            ("version", side.version),
            ("blocks", ",".join(str(b) for b in side.blocks)),
            ("k_alpha", _format_float(side.k_alpha)),
            ("strength_floor", _format_float(side.strength_floor)),
            ("classes", ",".join(f"{name}:{_format_float(c)}" for name, c in side.classes)),
            ("logo_rows", side.logo_shape[0]),
            ("logo_cols", side.logo_shape[1]),
        ],
        path,
        comment=comment,
    )


def read_sideinfo(path):
    from .codec import SideInfo

    pairs = read_keyvalues(path)
    missing = [k for k in _SIDEINFO_KEYS if k not in pairs]
    if missing:
        raise ValidationError(f"side info missing keys: {', '.join(missing)}")
    unknown = [k for k in pairs if k not in _SIDEINFO_KEYS]
    if unknown:
        raise ValidationError(f"side info has unknown keys: {', '.join(unknown)}")

    try:
        version = int(pairs["version"])
        blocks = tuple(check_block_index(tok) for tok in pairs["blocks"].split(","))
        k_alpha = check_k_alpha(pairs["k_alpha"])
        floor = check_positive(pairs["strength_floor"], "strength_floor")
        logo_shape = (int(pairs["logo_rows"]), int(pairs["logo_cols"]))
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError(f"malformed side info value: {exc}") from exc
    classes = []
    if pairs["classes"]:
        for entry in pairs["classes"].split(","):
            if ":" not in entry:
                raise ValidationError(f"malformed class entry {entry!r} (want name:coeff)")
            name, coeff = entry.split(":", 1)
            try:
                classes.append((name, float(coeff)))
            except ValueError as exc:
                raise ValidationError(f"malformed class coefficient in {entry!r}") from exc
    side = SideInfo(
        version=version,
        blocks=blocks,
        k_alpha=k_alpha,
        strength_floor=floor,
        classes=tuple(classes),
        logo_shape=logo_shape,
    )
    side.validate()
    if len(side.blocks) != NUM_SELECTED:
        raise ValidationError(f"side info must list {NUM_SELECTED} blocks")
    return side
