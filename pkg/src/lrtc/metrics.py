"""Restoration quality metrics and the relative patch rank analysis.

PSNR uses the conventional MAX^2 / MSE form with MAX taken from the ground
truth; a perfect restoration reports ``math.inf`` (never NaN).  The relative
patch rank (RPR) of a patch is the number of leading singular values of its
mode-1 matricization needed to reach 90% of the total singular value sum,
divided by the largest possible rank of that matricization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .patches import extract_patches, make_grid
from .tensor_ops import matricize

RPR_MASS = 0.9


@dataclass
class MetricReport:
    psnr: float
    rse: float
    dims: tuple
    max_pixel: float


@dataclass
class RPRReport:
    stage: int  # 0 = coarse (whole image), f >= 1 = fine stage 2^f grid
    per_patch_rpr: np.ndarray
    average_rpr: float

    @property
    def label(self) -> str:
        return "coarse" if self.stage == 0 else f"fine-{self.stage}"


def rse(z: np.ndarray, truth: np.ndarray) -> float:
    """Relative squared error ||z - truth||_F / ||truth||_F."""
    z = np.asarray(z, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if z.shape != truth.shape:
        raise ValueError(f"shape mismatch: {z.shape} vs {truth.shape}")
    denom = np.linalg.norm(truth.ravel())
    if denom == 0.0:
        raise ValueError("reference tensor is identically zero")
    return float(np.linalg.norm((z - truth).ravel()) / denom)


def psnr(z: np.ndarray, truth: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB; inf for an exact match."""
    z = np.asarray(z, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if z.shape != truth.shape:
        raise ValueError(f"shape mismatch: {z.shape} vs {truth.shape}")
    mse = float(np.mean((z - truth) ** 2))
    if mse == 0.0:
        return math.inf
    peak = float(truth.max())
    return 10.0 * math.log10(peak * peak / mse)


def report(z: np.ndarray, truth: np.ndarray) -> MetricReport:
    return MetricReport(
        psnr=psnr(z, truth),
        rse=rse(z, truth),
        dims=tuple(truth.shape),
        max_pixel=float(np.asarray(truth).max()),
    )


def rpr(patch: np.ndarray) -> float:
    """Relative patch rank of a spatial patch (H x W or H x W x C)."""
    patch = np.asarray(patch, dtype=np.float64)
    if patch.ndim == 2:
        patch = patch[:, :, None]
    if patch.ndim != 3:
        raise ValueError(f"expected a 2- or 3-way patch, got shape {patch.shape}")
    h, w, c = patch.shape
    if h * w == 1:
        raise ValueError("relative rank is undefined for a single-pixel patch")
    sigma = np.linalg.svd(matricize(patch, 0), compute_uv=False)
    r = int(np.searchsorted(np.cumsum(sigma), RPR_MASS * sigma.sum()) + 1)
    r = min(r, sigma.size)
    return r / min(h, w * c)


def rpr_table(truth: np.ndarray, stages: int = 3) -> list:
    """Average RPR for the whole image and each dyadic patch stage (no overlap)."""
    truth = np.asarray(truth, dtype=np.float64)
    reports = [RPRReport(stage=0, per_patch_rpr=np.array([rpr(truth)]),
                         average_rpr=rpr(truth))]
    for f in range(1, stages + 1):
        grid = make_grid(truth.shape, f, 0)
        values = np.array([rpr(p) for p in extract_patches(truth, grid)])
        reports.append(RPRReport(stage=f, per_patch_rpr=values,
                                 average_rpr=float(values.mean())))
    return reports
