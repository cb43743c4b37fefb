"""Dense d-way tensor primitives: matricization, mode products, HOSVD, proximal operators.

Layout contract
---------------
Tensors are plain ``numpy.ndarray`` objects in float64.  The mode-k
matricization places tensor element ``(i_0, ..., i_{d-1})`` at matrix element
``(i_k, j)`` where ``j`` is the column-major (first remaining index varies
fastest) linear index of the remaining indices taken in their natural order:

    j = sum_{n != k} i_n * J_n,   J_n = prod_{m < n, m != k} I_m

Every operation in this package that moves between tensors and matrices goes
through :func:`matricize` / :func:`fold`, so this is the single normative
layout rule.  All operations are pure; inputs are never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def as_tensor(data) -> np.ndarray:
    """Coerce to a float64 ndarray, rejecting empty or non-finite input."""
    t = np.asarray(data, dtype=np.float64)
    if t.size == 0:
        raise ValueError("empty tensor")
    if not np.all(np.isfinite(t)):
        raise ValueError("tensor contains non-finite entries")
    return t


def _check_mode(t: np.ndarray, mode: int) -> None:
    if not 0 <= mode < t.ndim:
        raise ValueError(f"mode {mode} out of range for a {t.ndim}-way tensor")


def matricize(t: np.ndarray, mode: int) -> np.ndarray:
    """Mode-k matricization, shape (I_k, prod of the other dimensions)."""
    t = np.asarray(t)
    _check_mode(t, mode)
    return np.reshape(np.moveaxis(t, mode, 0), (t.shape[mode], -1), order="F")


def fold(m: np.ndarray, mode: int, dims) -> np.ndarray:
    """Inverse of :func:`matricize`: rebuild a tensor of shape ``dims``."""
    m = np.asarray(m)
    dims = tuple(int(d) for d in dims)
    if not 0 <= mode < len(dims):
        raise ValueError(f"mode {mode} out of range for shape {dims}")
    rest = dims[:mode] + dims[mode + 1:]
    if m.shape != (dims[mode], int(np.prod(rest, dtype=np.int64))):
        raise ValueError(f"matrix shape {m.shape} does not fold into {dims} at mode {mode}")
    return np.moveaxis(np.reshape(m, (dims[mode],) + rest, order="F"), 0, mode)


def mode_product(t: np.ndarray, u: np.ndarray, mode: int) -> np.ndarray:
    """Mode-k product t x_k u for a matrix u of shape (R, I_k)."""
    t = np.asarray(t)
    u = np.asarray(u)
    _check_mode(t, mode)
    if u.ndim != 2 or u.shape[1] != t.shape[mode]:
        raise ValueError(
            f"matrix of shape {u.shape} does not act on mode {mode} of size {t.shape[mode]}"
        )
    return np.moveaxis(np.tensordot(u, t, axes=(1, mode)), 0, mode)


def multi_mode_product(t: np.ndarray, matrices, transpose: bool = False) -> np.ndarray:
    """Apply one matrix per mode in sequence; ``transpose`` applies each U_k^T."""
    out = np.asarray(t)
    for k, u in enumerate(matrices):
        if u is None:
            continue
        out = mode_product(out, u.T if transpose else u, k)
    return out


def frobenius_norm(t: np.ndarray) -> float:
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(np.asarray(t).ravel()))


def svd(m: np.ndarray):
    """Thin SVD (U, s, Vt) with a deterministic sign convention.

    The largest-magnitude entry of every left singular vector is made
    nonnegative so repeated runs produce identical factors.  Singular values
    come back sorted descending (LAPACK order).
    """
    m = np.asarray(m, dtype=np.float64)
    if not np.all(np.isfinite(m)):
        raise ValueError("svd input contains non-finite entries")
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    lead = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[lead, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs, s, vt * signs[:, None]


def svt(m: np.ndarray, tau: float) -> np.ndarray:
    """Singular value thresholding, the proximal operator of the trace norm."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    u, s, vt = svd(m)
    keep = s > tau
    if not np.any(keep):
        return np.zeros_like(np.asarray(m, dtype=np.float64))
    return (u[:, keep] * (s[keep] - tau)) @ vt[keep]


def soft_threshold(x: np.ndarray, tau: float) -> np.ndarray:
    """Entrywise shrinkage sign(x) * max(|x| - tau, 0)."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)


@dataclass
class FactorSet:
    """Tucker core plus per-mode factor matrices with orthonormal columns."""

    core: np.ndarray
    factors: list

    def reconstruct(self) -> np.ndarray:
        return multi_mode_product(self.core, self.factors)


def hosvd(t: np.ndarray, ranks) -> FactorSet:
    """Higher-order SVD truncated to ``ranks`` (one rank per mode)."""
    t = as_tensor(t)
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != t.ndim:
        raise ValueError(f"expected {t.ndim} ranks, got {len(ranks)}")
    for k, r in enumerate(ranks):
        if not 1 <= r <= t.shape[k]:
            raise ValueError(f"rank {r} out of range for mode {k} of size {t.shape[k]}")
    factors = [_left_singular_basis(matricize(t, k), r) for k, r in enumerate(ranks)]
    core = multi_mode_product(t, factors, transpose=True)
    return FactorSet(core=core, factors=factors)


def _left_singular_basis(m: np.ndarray, r: int) -> np.ndarray:
    """First r left singular vectors, padded from the full SVD if the thin
    factorization has fewer columns than r (tall matrix, r beyond its width)."""
    u, _, _ = svd(m)
    if u.shape[1] < r:
        u = np.linalg.svd(m, full_matrices=True)[0]
        lead = np.argmax(np.abs(u), axis=0)
        signs = np.sign(u[lead, np.arange(u.shape[1])])
        signs[signs == 0] = 1.0
        u = u * signs
    return u[:, :r]
