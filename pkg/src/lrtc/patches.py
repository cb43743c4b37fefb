"""Patch grids for the fine stages: dyadic spatial tilings with overlap.

Stage f tiles the image into a 2^f x 2^f grid of disjoint core regions.  Each
patch region is its core expanded by the overlap width on every internal side
(image borders stay put), so neighboring patches share pixel strips.  Merging
accepted patches back averages every pixel over the accepted patches covering
it; uncovered pixels keep the base image values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Region:
    """Half-open spatial rectangle [r0, r1) x [c0, c1)."""

    r0: int
    r1: int
    c0: int
    c1: int

    @property
    def shape(self):
        return (self.r1 - self.r0, self.c1 - self.c0)

    def contains(self, other: "Region") -> bool:
        return (self.r0 <= other.r0 and other.r1 <= self.r1
                and self.c0 <= other.c0 and other.c1 <= self.c1)


@dataclass(frozen=True)
class PatchGrid:
    """Partition geometry for one fine stage."""

    stage: int
    dims: tuple
    overlap: int
    core_regions: tuple
    patch_regions: tuple

    @property
    def n_patches(self) -> int:
        return len(self.core_regions)


def _split(extent: int, parts: int):
    """Near-equal split; the trailing regions absorb the remainder pixels."""
    base, rem = divmod(extent, parts)
    sizes = [base] * (parts - rem) + [base + 1] * rem
    edges = np.concatenate(([0], np.cumsum(sizes)))
    return [(int(edges[i]), int(edges[i + 1])) for i in range(parts)]


def make_grid(dims, stage: int, overlap: int = 0) -> PatchGrid:
    """Build the 2^stage x 2^stage grid with the given overlap width.

    The overlap is clamped to half the smallest core side so patches never
    swallow their neighbors' cores.
    """
    dims = tuple(int(d) for d in dims)
    if stage < 1:
        raise ValueError("stage must be >= 1")
    if overlap < 0:
        raise ValueError("overlap must be nonnegative")
    g = 2 ** stage
    h, w = dims[0], dims[1]
    if h < g or w < g:
        raise ValueError(f"grid {g}x{g} finer than image extent {h}x{w}")
    rows = _split(h, g)
    cols = _split(w, g)
    min_core = min(rows[0][1] - rows[0][0], cols[0][1] - cols[0][0])
    o = min(overlap, min_core // 2)
    cores = []
    patches = []
    for r0, r1 in rows:
        for c0, c1 in cols:
            cores.append(Region(r0, r1, c0, c1))
            patches.append(Region(
                max(r0 - o, 0) if r0 > 0 else 0,
                min(r1 + o, h) if r1 < h else h,
                max(c0 - o, 0) if c0 > 0 else 0,
                min(c1 + o, w) if c1 < w else w,
            ))
    return PatchGrid(stage=stage, dims=dims, overlap=o,
                     core_regions=tuple(cores), patch_regions=tuple(patches))


def extract_patches(t: np.ndarray, grid: PatchGrid) -> list:
    """Copy out every patch region of t (all trailing axes included)."""
    t = np.asarray(t)
    if t.shape[:2] != grid.dims[:2]:
        raise ValueError(f"tensor shape {t.shape} does not match grid dims {grid.dims}")
    return [t[reg.r0:reg.r1, reg.c0:reg.c1].copy() for reg in grid.patch_regions]


def merge_patches(base: np.ndarray, accepted, grid: PatchGrid) -> np.ndarray:
    """Write accepted patches over base, averaging where patches overlap.

    ``accepted`` is a sequence of (patch index, patch array) pairs.  Pixels not
    covered by any accepted patch keep their base values.
    """
    base = np.asarray(base)
    if base.shape[:2] != grid.dims[:2]:
        raise ValueError(f"base shape {base.shape} does not match grid dims {grid.dims}")
    seen = set()
    acc = np.zeros_like(base, dtype=np.float64)
    cnt = np.zeros(base.shape[:2] + (1,) * (base.ndim - 2), dtype=np.int64)
    lo = np.full(base.shape, np.inf)
    hi = np.full(base.shape, -np.inf)
    for k, patch in accepted:
        if k in seen:
            raise ValueError(f"duplicate patch index {k} in accepted list")
        seen.add(k)
        reg = grid.patch_regions[k]
        patch = np.asarray(patch)
        if patch.shape[:2] != reg.shape:
            raise ValueError(
                f"patch {k} shape {patch.shape[:2]} does not match region {reg.shape}"
            )
        sl = np.s_[reg.r0:reg.r1, reg.c0:reg.c1]
        acc[sl] += patch
        cnt[sl] += 1
        np.minimum(lo[sl], patch, out=lo[sl])
        np.maximum(hi[sl], patch, out=hi[sl])
    out = np.array(base, dtype=np.float64, copy=True)
    covered = np.broadcast_to(cnt > 0, out.shape)
    np.divide(acc, cnt, out=acc, where=covered)
    out[covered] = acc[covered]
    # when every covering patch agrees, take the common value directly so the
    # mean cannot pick up division rounding (keeps conservation bit exact)
    agree = covered & (lo == hi)
    out[agree] = lo[agree]
    return out
