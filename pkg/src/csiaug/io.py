"""Portable spectrogram files and grayscale PNG previews.

File layout (all integers little-endian)::

    offset size  field
    0      4     magic "CSIS"
    4      2     version, unsigned 16-bit (currently 1)
    6      4     w, unsigned 32-bit (time columns)
    10     4     h, unsigned 32-bit (subcarrier rows)
    14     1     label, signed 8-bit (-1 = unlabeled)
    15     7     reserved, zero
    22     4*w*h IEEE-754 float32 amplitudes, time-major

Total size is exactly ``22 + 4*w*h`` bytes.  Payload values must be finite
and non-negative.  Amplitudes are stored as float32; in-memory spectrograms
use float64, and float32 -> float64 -> float32 round-trips are exact, so
writing a just-read file reproduces it byte for byte.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import FormatError
from .spectro import Spectrogram

MAGIC = b"CSIS"
VERSION = 1
_HEADER = struct.Struct("<4sHIIb7x")
HEADER_SIZE = _HEADER.size  # 22


def write_spectrogram(path, spec: Spectrogram, label: int = -1) -> None:
    """Write one spectrogram (label -1 means unlabeled)."""
    if not (-1 <= label <= 127):
        raise FormatError(f"label {label} outside signed 8-bit range [-1, 127]")
    payload = spec.values.astype("<f4")
    if not np.all(np.isfinite(payload)):
        raise FormatError("values overflow float32")
    header = _HEADER.pack(MAGIC, VERSION, spec.w, spec.h, label)
    Path(path).write_bytes(header + payload.tobytes(order="C"))


def read_spectrogram(path) -> tuple[Spectrogram, int]:
    """Read one spectrogram file, returning (spectrogram, label)."""
    raw = Path(path).read_bytes()
    if len(raw) < HEADER_SIZE:
        raise FormatError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, w, h, label = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if w < 1 or h < 1:
        raise FormatError(f"{path}: invalid dimensions {w}x{h}")
    expected = HEADER_SIZE + 4 * w * h
    if len(raw) != expected:
        raise FormatError(f"{path}: size {len(raw)} != expected {expected} for {w}x{h}")
    payload = np.frombuffer(raw, dtype="<f4", offset=HEADER_SIZE)
    if not np.all(np.isfinite(payload)):
        raise FormatError(f"{path}: non-finite payload values")
    if np.any(payload < 0.0):
        raise FormatError(f"{path}: negative payload values")
    values = payload.astype(np.float64).reshape(w, h)
    return Spectrogram(values), int(label)


def render_png(spec: Spectrogram, path) -> None:
    """Render a w x h pixel 8-bit grayscale PNG, min-max normalized.

    Time runs along the image x axis, subcarrier index along y (row 0 at
    the top).  A constant spectrogram renders mid-gray (128).
    """
    img = spec.values.T  # (h, w): PIL rows are image rows
    vmin = float(img.min())
    vmax = float(img.max())
    if vmax > vmin:
        pixels = np.rint((img - vmin) / (vmax - vmin) * 255.0).astype(np.uint8)
    else:
        pixels = np.full(img.shape, 128, dtype=np.uint8)
    Image.fromarray(pixels, mode="L").save(Path(path), format="PNG")
