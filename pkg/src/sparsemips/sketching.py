"""Mass-based sketches for sparse vectors and collections.

Three procedures live here:
  * seeded l1 threshold sampling with its unbiased inner-product estimator,
  * the per-vector top-mass subvector (keep the fewest largest entries that
    reach a target fraction of the l1 mass),
  * the collection-level variant that keeps, per dimension, the largest
    column values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .vectors import SparseVector, VectorSet, lp_norm

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64_SCALE = float(2**64)


class ZeroVectorError(ValueError):
    pass


def _mix64(x):
    # splitmix64 finalizer; wraps mod 2**64
    with np.errstate(over="ignore"):
        x = (x ^ (x >> np.uint64(30))) * _MIX1
        x = (x ^ (x >> np.uint64(27))) * _MIX2
        return x ^ (x >> np.uint64(31))


def _seed_term(seed):
    with np.errstate(over="ignore"):
        if isinstance(seed, np.ndarray):
            base = (seed & np.uint64(0xFFFFFFFFFFFFFFFF)) + _GOLDEN
        else:
            base = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF) + _GOLDEN
    return _mix64(base)


def hash_unit(dims, seed):
    """Deterministic hash of dimension indices into [0, 1).

    h(i) = splitmix64((i+1) * golden_ratio_64 + mix(seed)) / 2**64.  The
    algorithm is fixed so that sketches reproduce across platforms.
    """
    dims = np.asarray(dims, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = (dims + np.uint64(1)) * _GOLDEN + _seed_term(seed)
    return _mix64(x).astype(np.float64) / _U64_SCALE


@dataclass(frozen=True)
class ThresholdSketch:
    """Output of l1 threshold sampling."""

    keys: np.ndarray          # surviving dims, sorted
    values: np.ndarray        # matching float32 values of the input
    tau: float                # d_target / ||u||_1
    d_target: float           # kept for auditability
    seed: int


def l1_threshold_sample(u: SparseVector, d_target: float, seed: int) -> ThresholdSketch:
    """Keep entry i with probability min(1, d_target * u_i / ||u||_1)."""
    l1 = lp_norm(u, 1)
    if l1 == 0.0:
        raise ZeroVectorError("cannot sketch a zero vector")
    if d_target <= 0:
        raise ValueError("d_target must be positive")
    thresholds = d_target * u.values.astype(np.float64) / l1
    keep = hash_unit(u.dims, seed) <= np.minimum(1.0, thresholds)
    return ThresholdSketch(
        keys=u.dims[keep],
        values=u.values[keep],
        tau=d_target / l1,
        d_target=float(d_target),
        seed=int(seed),
    )


def ts_estimate(su: ThresholdSketch, sv: ThresholdSketch) -> float:
    """Unbiased inner-product estimate from two same-seed sketches."""
    if su.keys.size == 0 or sv.keys.size == 0:
        return 0.0
    _, iu, iv = np.intersect1d(su.keys, sv.keys, assume_unique=True, return_indices=True)
    if iu.size == 0:
        return 0.0
    uv = su.values[iu].astype(np.float64)
    vv = sv.values[iv].astype(np.float64)
    p = np.minimum(1.0, np.minimum(uv * su.tau, vv * sv.tau))
    return float(np.sum(uv * vv / p))


def ts_estimate_trials(u: SparseVector, v: SparseVector, d_target: float, seeds) -> np.ndarray:
    """Vectorized Monte-Carlo: the estimate for each seed in `seeds`.

    Equivalent to sketching u and v with each seed and calling ts_estimate;
    only dims in the common support can contribute, and a common dim
    survives both sketches iff h(i) <= min(1, u_i*tau_u, v_i*tau_v).
    """
    l1u, l1v = lp_norm(u, 1), lp_norm(v, 1)
    if l1u == 0.0 or l1v == 0.0:
        raise ZeroVectorError("cannot sketch a zero vector")
    seeds = np.asarray(seeds, dtype=np.uint64)
    common, iu, iv = np.intersect1d(u.dims, v.dims, assume_unique=True, return_indices=True)
    if common.size == 0:
        return np.zeros(seeds.size, dtype=np.float64)
    uv = u.values[iu].astype(np.float64)
    vv = v.values[iv].astype(np.float64)
    p = np.minimum(1.0, np.minimum(uv * (d_target / l1u), vv * (d_target / l1v)))
    contrib = uv * vv / p
    with np.errstate(over="ignore"):
        dim_term = (common.astype(np.uint64) + np.uint64(1)) * _GOLDEN
    out = np.empty(seeds.size, dtype=np.float64)
    chunk = max(1, 4_000_000 // common.size)
    for start in range(0, seeds.size, chunk):
        batch = seeds[start:start + chunk]
        with np.errstate(over="ignore"):
            x = dim_term[None, :] + _seed_term(batch)[:, None]
        h = _mix64(x).astype(np.float64) / _U64_SCALE
        out[start:start + batch.size] = (h <= p) @ contrib
    return out


def alpha_mss(u: SparseVector, alpha: float) -> SparseVector:
    """Smallest top-value subvector reaching a fraction alpha of the l1 mass.

    Ties sort by (value descending, dim ascending).
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    l1 = lp_norm(u, 1)
    if l1 == 0.0:
        raise ZeroVectorError("cannot sketch a zero vector")
    order = np.argsort(-u.values, kind="stable")  # dims already ascending
    csum = np.cumsum(u.values[order].astype(np.float64))
    # boundary comparison tolerates float32 value rounding
    threshold = (alpha - 1e-6) * csum[-1]
    j = int(np.searchsorted(csum, threshold, side="left"))
    keep = np.sort(order[: j + 1])
    return SparseVector(u.dims[keep], u.values[keep])


def set_alpha_mss(vset: VectorSet, alpha: float) -> VectorSet:
    """Per dimension, keep the ceil(alpha * |L_i|) largest column values.

    Column ties sort by (value descending, row id ascending).  Output vectors
    are subvectors of the inputs; dimensionality and vector count unchanged.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    csc = vset.to_scipy().tocsc()
    csc.sort_indices()
    keep_mask = np.zeros(csc.data.size, dtype=bool)
    indptr = csc.indptr
    for i in range(csc.shape[1]):
        s, e = indptr[i], indptr[i + 1]
        n = e - s
        if n == 0:
            continue
        lam = min(int(np.ceil(alpha * n)), n)
        if lam == n:
            keep_mask[s:e] = True
            continue
        order = np.argsort(-csc.data[s:e], kind="stable")  # rows ascending in csc
        keep_mask[s + order[:lam]] = True
    pruned = sp.csc_matrix(
        (np.where(keep_mask, csc.data, 0.0), csc.indices, csc.indptr), shape=csc.shape
    ).tocsr()
    pruned.eliminate_zeros()
    pruned.sort_indices()
    # preserve the row count even if trailing rows became empty
    return VectorSet(vset.dim, _pad_indptr(pruned.indptr, len(vset)), pruned.indices, pruned.data)


def _pad_indptr(indptr, nrows):
    if indptr.size == nrows + 1:
        return indptr
    out = np.empty(nrows + 1, dtype=np.uint64)
    out[: indptr.size] = indptr
    out[indptr.size:] = indptr[-1]
    return out
