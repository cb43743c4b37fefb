"""Read and write 8-bit RGB images as float tensors in [0, 1].

PNG goes through Pillow; binary PPM (P6, maxval 255) is parsed directly.
Loading maps channel value v to v/255; saving clamps to [0, 1] exactly once
and quantizes with round(v * 255), so an 8-bit round trip is bit exact.
"""

from __future__ import annotations

import re

import numpy as np
from PIL import Image, UnidentifiedImageError


class ImageFormatError(ValueError):
    """Raised for unreadable or non-RGB image input."""


def load_image(path) -> np.ndarray:
    """Load a PNG or PPM(P6) file as an H x W x 3 float64 tensor in [0, 1]."""
    path = str(path)
    if path.lower().endswith((".ppm", ".pnm")):
        return _load_ppm(path)
    try:
        with Image.open(path) as img:
            if img.mode != "RGB":
                raise ImageFormatError(f"{path}: expected RGB input, got mode {img.mode}")
            data = np.asarray(img, dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as exc:
        raise ImageFormatError(f"{path}: cannot decode image: {exc}") from exc
    return data.astype(np.float64) / 255.0


def save_image(path, tensor: np.ndarray) -> None:
    """Clamp to [0, 1], quantize to 8 bits, write PNG or PPM by extension."""
    path = str(path)
    data = quantize(tensor)
    if path.lower().endswith((".ppm", ".pnm")):
        with open(path, "wb") as fh:
            fh.write(b"P6\n%d %d\n255\n" % (data.shape[1], data.shape[0]))
            fh.write(data.tobytes())
    else:
        Image.fromarray(data, mode="RGB").save(path, format="PNG")


def quantize(tensor: np.ndarray) -> np.ndarray:
    """[0,1]-clamped float tensor -> uint8 H x W x 3 array."""
    t = np.asarray(tensor, dtype=np.float64)
    if t.ndim != 3 or t.shape[2] != 3:
        raise ImageFormatError(f"expected an H x W x 3 tensor, got shape {t.shape}")
    return np.round(np.clip(t, 0.0, 1.0) * 255.0).astype(np.uint8)


_PPM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*(\S+)")


def _load_ppm(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    if not blob.startswith(b"P6"):
        raise ImageFormatError(f"{path}: not a binary PPM (P6) file")
    # header: magic, width, height, maxval, then a single whitespace byte
    pos = 2
    fields = []
    for _ in range(3):
        m = _PPM_TOKEN.match(blob, pos)
        if m is None:
            raise ImageFormatError(f"{path}: truncated PPM header")
        fields.append(m.group(1))
        pos = m.end()
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError as exc:
        raise ImageFormatError(f"{path}: malformed PPM header") from exc
    if maxval != 255:
        raise ImageFormatError(f"{path}: only maxval 255 PPM supported, got {maxval}")
    pos += 1  # single whitespace after maxval
    expected = width * height * 3
    raster = np.frombuffer(blob, dtype=np.uint8, offset=pos)
    if raster.size < expected:
        raise ImageFormatError(f"{path}: PPM raster too short")
    return raster[:expected].reshape(height, width, 3).astype(np.float64) / 255.0
