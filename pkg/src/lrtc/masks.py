"""Observation masks: seeded random generation and a binary file format.

A mask is a boolean ndarray with the same shape as the target tensor; True
marks an observed entry.  Generation is deterministic per seed.  The file
format ("C2FM") stores dims, seed, missing ratio and the bit-packed indicator
stream, all integers little-endian, so a reload reproduces the mask bitwise.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"C2FM"
VERSION = 1


class MaskFormatError(ValueError):
    """Raised for malformed mask files."""


def random_mask(dims, missing_ratio: float, seed: int, mode: str = "entry") -> np.ndarray:
    """Mark floor(missing_ratio * total) entries missing, uniformly at random.

    mode="entry" samples individual tensor entries; mode="pixel" samples
    spatial sites of an H x W x C tensor so all channels go missing together.
    """
    dims = tuple(int(d) for d in dims)
    if not 0 < missing_ratio < 1:
        raise ValueError(f"missing_ratio must be in (0, 1), got {missing_ratio}")
    rng = np.random.default_rng(seed)
    if mode == "entry":
        total = int(np.prod(dims))
        n_missing = int(missing_ratio * total)
        flat = np.ones(total, dtype=bool)
        flat[rng.choice(total, size=n_missing, replace=False)] = False
        return flat.reshape(dims)
    if mode == "pixel":
        if len(dims) != 3:
            raise ValueError("pixel mode requires an H x W x C shape")
        h, w, c = dims
        sites = h * w
        n_missing = int(missing_ratio * sites)
        flat = np.ones(sites, dtype=bool)
        flat[rng.choice(sites, size=n_missing, replace=False)] = False
        return np.repeat(flat.reshape(h, w, 1), c, axis=2)
    raise ValueError(f"unknown mask mode {mode!r}")


def observed_fraction(mask: np.ndarray) -> float:
    return float(np.count_nonzero(mask)) / mask.size


def check_mask(y: np.ndarray, mask: np.ndarray) -> None:
    """Validate a mask against its target tensor."""
    if mask.shape != y.shape:
        raise ValueError(f"mask shape {mask.shape} != tensor shape {y.shape}")
    if mask.dtype != bool:
        raise ValueError("mask must be boolean")
    if not mask.any():
        raise ValueError("mask has no observed entries")
    if not np.all(np.isfinite(np.asarray(y)[mask])):
        raise ValueError("observed entries contain non-finite values")


@dataclass
class MaskRecord:
    mask: np.ndarray
    seed: int
    missing_ratio: float


def save_mask(path, mask: np.ndarray, seed: int, missing_ratio: float) -> None:
    mask = np.asarray(mask, dtype=bool)
    header = MAGIC + struct.pack("<BB", VERSION, mask.ndim)
    header += struct.pack(f"<{mask.ndim}I", *mask.shape)
    header += struct.pack("<q", int(seed))
    header += struct.pack("<d", float(missing_ratio))
    packed = np.packbits(mask.ravel()).tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(packed)


def load_mask(path) -> MaskRecord:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise MaskFormatError("not a mask file (bad magic)")
    version, ndim = struct.unpack_from("<BB", blob, 4)
    if version != VERSION:
        raise MaskFormatError(f"unsupported mask file version {version}")
    off = 6
    dims = struct.unpack_from(f"<{ndim}I", blob, off)
    off += 4 * ndim
    (seed,) = struct.unpack_from("<q", blob, off)
    off += 8
    (ratio,) = struct.unpack_from("<d", blob, off)
    off += 8
    total = int(np.prod(dims))
    packed = np.frombuffer(blob, dtype=np.uint8, offset=off)
    if packed.size != (total + 7) // 8:
        raise MaskFormatError("indicator stream length does not match dims")
    mask = np.unpackbits(packed, count=total).astype(bool).reshape(dims)
    return MaskRecord(mask=mask, seed=seed, missing_ratio=ratio)
