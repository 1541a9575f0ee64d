"""Blocked inverted index over a mass-sketched collection.

Construction: sketch the collection (set-level top-mass pruning), build one
inverted list per dimension from the sketched vectors, partition each list
into geometrically-cohesive blocks with shallow K-Means, and attach to each
block a conservative coordinatewise-max summary, truncated by a top-mass
sketch and optionally quantized to 8 bits.  The forward index keeps the
original vectors for exact re-scoring.
"""
from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field

import numpy as np

from .sketching import alpha_mss, set_alpha_mss
from .storage import HeaderError, StorageError
from .vectors import SparseVector, VectorSet

INDEX_MAGIC = b"SPMIDX01"


@dataclass(frozen=True)
class BuildParams:
    alpha: float          # set-level sketch mass fraction, (0, 1]
    beta: float           # blocks-per-list factor, (0, 1)
    gamma: float          # summary truncation mass fraction, (0, 1]
    quantize: bool = True
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0 < self.beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")


@dataclass(frozen=True)
class QuantizedSummary:
    """8-bit scalar quantization of a summary vector.

    delta = (max - m) / 256; codes index equal sub-intervals above the
    minimum m.  delta == 0 is legal (all values equal, all codes 0).
    """

    dims: np.ndarray      # uint32, sorted
    codes: np.ndarray     # uint8
    m: float
    delta: float

    def reconstruct(self, position) -> float:
        return float(self.m + float(self.codes[position]) * self.delta)

    def reconstruct_all(self) -> np.ndarray:
        return self.m + self.codes.astype(np.float64) * self.delta


def quantize_summary(s: SparseVector) -> QuantizedSummary:
    if s.dims.size == 0:
        raise ValueError("cannot quantize an empty summary")
    vals = s.values.astype(np.float64)
    # m and delta are float32 on disk; compute codes from the rounded values
    # so in-memory and reloaded summaries reconstruct identically
    m = float(np.float32(vals.min()))
    delta64 = (vals.max() - m) / 256.0
    delta = np.float32(delta64)
    if float(delta) < delta64:  # round up so 256*delta covers the range
        delta = np.nextafter(delta, np.float32(np.inf), dtype=np.float32)
    delta = float(delta)
    if delta == 0.0:
        codes = np.zeros(vals.size, dtype=np.uint8)
    else:
        codes = np.clip(np.floor((vals - m) / delta), 0, 255).astype(np.uint8)
    return QuantizedSummary(dims=s.dims.copy(), codes=codes, m=m, delta=delta)


@dataclass(frozen=True)
class Block:
    """One atomic unit of evaluation: member ids plus their summary."""

    ids: np.ndarray                      # uint32, sorted, unique, nonempty
    summary: object                      # SparseVector or QuantizedSummary

    def summary_arrays(self):
        """(dims, float64 values) of the summary, dequantizing on the fly."""
        if isinstance(self.summary, QuantizedSummary):
            return self.summary.dims, self.summary.reconstruct_all()
        return self.summary.dims, self.summary.values.astype(np.float64)


def cluster_list(members, beta, seed):
    """Partition (id, sketched-vector) members into geometric blocks.

    Samples c = max(1, ceil(beta * n)) members (capped at n) uniformly
    without replacement as centroids and assigns every member to the
    centroid maximizing the inner product, lowest centroid index on ties.
    Returns the nonempty clusters as lists of member positions.
    """
    n = len(members)
    if n == 0:
        raise ValueError("cannot cluster an empty list")
    c = min(max(1, int(np.ceil(beta * n))), n)
    rng = np.random.default_rng(seed)
    centroid_pos = np.sort(rng.choice(n, size=c, replace=False))
    if c == 1:
        return [list(range(n))]
    dim = 1 + max(int(v.dims.max()) if v.dims.size else 0 for _, v in members)
    mat = VectorSet.from_vectors(dim, [v for _, v in members]).to_scipy(dtype=np.float64)
    scores = np.asarray((mat @ mat[centroid_pos].T).todense())
    assign = np.argmax(scores, axis=1)  # argmax takes lowest index on ties
    clusters = [np.flatnonzero(assign == k).tolist() for k in range(c)]
    return [cl for cl in clusters if cl]


def summarize(block_members) -> SparseVector:
    """Coordinatewise maximum over a nonempty list of sparse vectors."""
    if not block_members:
        raise ValueError("cannot summarize an empty block")
    dims = np.concatenate([v.dims for v in block_members])
    values = np.concatenate([v.values for v in block_members])
    if dims.size == 0:
        return SparseVector(dims.astype(np.uint32), values.astype(np.float32))
    order = np.argsort(dims, kind="stable")
    dims, values = dims[order], values[order]
    uniq, starts = np.unique(dims, return_index=True)
    maxima = np.maximum.reduceat(values, starts)
    return SparseVector(uniq, maxima)


class BlockedIndex:
    """Per-dimension block lists plus the forward index of original vectors."""

    def __init__(self, params: BuildParams, lists, forward: VectorSet):
        self.params = params
        self.lists = lists            # list (len == forward.dim) of list[Block]
        self.forward = forward

    def __len__(self):
        return len(self.forward)

    @property
    def dim(self):
        return self.forward.dim


def build_index(vset: VectorSet, params: BuildParams) -> BlockedIndex:
    if len(vset) == 0:
        raise ValueError("cannot index an empty collection")
    sketched = set_alpha_mss(vset, params.alpha)
    csc = sketched.to_scipy().tocsc()
    csc.sort_indices()
    lists = [[] for _ in range(vset.dim)]
    for i in range(vset.dim):
        s, e = csc.indptr[i], csc.indptr[i + 1]
        if s == e:
            continue
        member_ids = csc.indices[s:e].astype(np.uint32)  # ascending
        members = [(int(j), sketched.vector(int(j))) for j in member_ids]
        clusters = cluster_list(members, params.beta, [params.seed, i])
        blocks = []
        for cl in clusters:
            ids = member_ids[cl]
            summary = summarize([members[p][1] for p in cl])
            summary = alpha_mss(summary, params.gamma)
            if params.quantize:
                summary = quantize_summary(summary)
            blocks.append(Block(ids=np.sort(ids), summary=summary))
        lists[i] = blocks
    return BlockedIndex(params, lists, vset)


# ---------------------------------------------------------------------------
# serialization: versioned binary container

def _write_arr(fh, arr, dtype):
    arr = np.ascontiguousarray(arr, dtype=dtype)
    fh.write(struct.pack("<Q", arr.size))
    fh.write(arr.tobytes())


def _read_arr(fh, dtype):
    (n,) = struct.unpack("<Q", fh.read(8))
    itemsize = np.dtype(dtype).itemsize
    buf = fh.read(n * itemsize)
    if len(buf) != n * itemsize:
        raise StorageError("truncated index payload")
    return np.frombuffer(buf, dtype=dtype)


def save_index(index: BlockedIndex, path):
    p = index.params
    with open(path, "wb") as fh:
        fh.write(INDEX_MAGIC)
        fh.write(struct.pack("<ddd?xxxq", p.alpha, p.beta, p.gamma, p.quantize, p.seed))
        fwd = index.forward
        fh.write(struct.pack("<QQ", len(fwd), fwd.dim))
        _write_arr(fh, fwd.indptr, "<u8")
        _write_arr(fh, fwd.indices, "<u4")
        _write_arr(fh, fwd.values, "<f4")
        for blocks in index.lists:
            fh.write(struct.pack("<I", len(blocks)))
            for b in blocks:
                _write_arr(fh, b.ids, "<u4")
                if isinstance(b.summary, QuantizedSummary):
                    fh.write(b"Q")
                    _write_arr(fh, b.summary.dims, "<u4")
                    _write_arr(fh, b.summary.codes, "u1")
                    fh.write(struct.pack("<ff", b.summary.m, b.summary.delta))
                else:
                    fh.write(b"R")
                    _write_arr(fh, b.summary.dims, "<u4")
                    _write_arr(fh, b.summary.values, "<f4")


def load_index(path) -> BlockedIndex:
    with open(path, "rb") as fh:
        magic = fh.read(len(INDEX_MAGIC))
        if magic != INDEX_MAGIC:
            raise HeaderError("not an index file (bad magic)")
        alpha, beta, gamma, quantize, seed = struct.unpack("<ddd?xxxq", fh.read(36))
        params = BuildParams(alpha=alpha, beta=beta, gamma=gamma, quantize=quantize, seed=seed)
        nrows, dim = struct.unpack("<QQ", fh.read(16))
        indptr = _read_arr(fh, "<u8")
        indices = _read_arr(fh, "<u4")
        values = _read_arr(fh, "<f4")
        forward = VectorSet(dim, indptr, indices, values)
        lists = []
        for _ in range(dim):
            (nblocks,) = struct.unpack("<I", fh.read(4))
            blocks = []
            for _ in range(nblocks):
                ids = _read_arr(fh, "<u4")
                kind = fh.read(1)
                dims = _read_arr(fh, "<u4")
                if kind == b"Q":
                    codes = _read_arr(fh, "u1")
                    m, delta = struct.unpack("<ff", fh.read(8))
                    summary = QuantizedSummary(dims=dims, codes=codes, m=m, delta=delta)
                elif kind == b"R":
                    vals = _read_arr(fh, "<f4")
                    summary = SparseVector(dims, vals)
                else:
                    raise StorageError("unknown summary tag in index file")
                blocks.append(Block(ids=ids, summary=summary))
            lists.append(blocks)
    return BlockedIndex(params, lists, forward)
