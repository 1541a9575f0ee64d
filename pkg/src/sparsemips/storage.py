"""Binary I/O: CSR collections, ground-truth files, and result TSVs.

Collection format (little-endian):
    header:  nrows u64, ncols u64, nnz u64
    indptr:  (nrows+1) u64, cumulative, indptr[0]=0, indptr[nrows]=nnz
    indices: nnz u32, strictly increasing within each row
    values:  nnz f32, all > 0

Ground-truth format: nq u32, k u32, nq*k ids u32 (row-major), nq*k scores f32.
"""
from __future__ import annotations

import struct

import numpy as np

from .vectors import VectorSet


class StorageError(Exception):
    """Base class for on-disk format violations."""


class HeaderError(StorageError):
    pass


class TruncatedPayloadError(StorageError):
    pass


class ConsistencyError(StorageError):
    pass


class IndexOrderError(StorageError):
    pass


class NonPositiveValueError(StorageError):
    pass


_HEADER = struct.Struct("<QQQ")


def save_collection(vset: VectorSet, path):
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(len(vset), vset.dim, vset.indices.size))
        fh.write(vset.indptr.astype("<u8").tobytes())
        fh.write(vset.indices.astype("<u4").tobytes())
        fh.write(vset.values.astype("<f4").tobytes())


def _read_exact(fh, nbytes, what):
    buf = fh.read(nbytes)
    if len(buf) != nbytes:
        raise TruncatedPayloadError(f"truncated payload while reading {what}")
    return buf


def load_collection(path) -> VectorSet:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise HeaderError("file too short for the 24-byte header")
        nrows, ncols, nnz = _HEADER.unpack(head)
        indptr = np.frombuffer(_read_exact(fh, 8 * (nrows + 1), "indptr"), dtype="<u8")
        indices = np.frombuffer(_read_exact(fh, 4 * nnz, "indices"), dtype="<u4")
        values = np.frombuffer(_read_exact(fh, 4 * nnz, "values"), dtype="<f4")
        if fh.read(1):
            raise ConsistencyError("trailing bytes after declared payload")

    if indptr[0] != 0:
        raise ConsistencyError("indptr[0] must be 0")
    if int(indptr[-1]) != nnz:
        raise ConsistencyError(f"indptr[nrows]={int(indptr[-1])} disagrees with nnz={nnz}")
    ip = indptr.astype(np.int64)
    if np.any(np.diff(ip) < 0):
        raise ConsistencyError("indptr must be nondecreasing")
    idx = indices.astype(np.int64)
    if nnz:
        if int(idx.max()) >= ncols:
            raise ConsistencyError("column index exceeds declared dimensionality")
        # within-row monotonicity: differences may reset only at row starts
        diffs = np.diff(idx)
        row_starts = np.zeros(nnz, dtype=bool)
        row_starts[ip[:-1][ip[:-1] < nnz]] = True
        bad = (diffs <= 0) & ~row_starts[1:]
        if np.any(bad):
            raise IndexOrderError("indices must be strictly increasing within each row")
        if np.any(values <= 0) or not np.all(np.isfinite(values)):
            raise NonPositiveValueError("values must be finite and strictly positive")
    return VectorSet(ncols, indptr, indices, values)


_GT_HEADER = struct.Struct("<II")


def save_ground_truth(ids, scores, path):
    """ids/scores: (nq, k) arrays, rows sorted by (score desc, id asc)."""
    ids = np.ascontiguousarray(ids, dtype="<u4")
    scores = np.ascontiguousarray(scores, dtype="<f4")
    if ids.shape != scores.shape or ids.ndim != 2:
        raise ValueError("ids and scores must be matching 2-d arrays")
    with open(path, "wb") as fh:
        fh.write(_GT_HEADER.pack(ids.shape[0], ids.shape[1]))
        fh.write(ids.tobytes())
        fh.write(scores.tobytes())


def load_ground_truth(path):
    with open(path, "rb") as fh:
        head = fh.read(_GT_HEADER.size)
        if len(head) != _GT_HEADER.size:
            raise HeaderError("ground-truth file too short for header")
        nq, k = _GT_HEADER.unpack(head)
        ids = np.frombuffer(_read_exact(fh, 4 * nq * k, "ids"), dtype="<u4").reshape(nq, k)
        scores = np.frombuffer(_read_exact(fh, 4 * nq * k, "scores"), dtype="<f4").reshape(nq, k)
    return ids, scores


def write_results_tsv(results, path):
    """results: per query, a sequence of (doc_id, score) pairs."""
    with open(path, "w") as fh:
        for qi, res in enumerate(results):
            for rank, (doc_id, score) in enumerate(res):
                fh.write(f"{qi}\t{rank}\t{doc_id}\t{score:.6f}\n")


def read_results_tsv(path):
    results = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            qi, rank, doc_id, score = line.split("\t")
            results.setdefault(int(qi), []).append((int(rank), int(doc_id), float(score)))
    out = []
    for qi in range(max(results) + 1 if results else 0):
        rows = sorted(results.get(qi, []))
        out.append([(doc_id, score) for _, doc_id, score in rows])
    return out
