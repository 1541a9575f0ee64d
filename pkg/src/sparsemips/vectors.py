"""Sparse vector primitives and the immutable collection container.

Vectors are stored as parallel arrays of strictly increasing dimension
indices (uint32) and strictly positive values (float32).  Inner products
accumulate in float64.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


class SparseVectorError(ValueError):
    pass


def _as_readonly(a):
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SparseVector:
    """A nonnegative sparse vector: sorted (dim, value) pairs, values > 0."""

    dims: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        dims = _as_readonly(np.ascontiguousarray(self.dims, dtype=np.uint32))
        values = _as_readonly(np.ascontiguousarray(self.values, dtype=np.float32))
        if dims.shape != values.shape or dims.ndim != 1:
            raise SparseVectorError("dims and values must be 1-d arrays of equal length")
        if dims.size and np.any(np.diff(dims.astype(np.int64)) <= 0):
            raise SparseVectorError("dims must be strictly increasing")
        if values.size and np.any(values <= 0):
            raise SparseVectorError("values must be strictly positive")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_pairs(cls, pairs):
        pairs = sorted(pairs)
        dims = np.array([d for d, _ in pairs], dtype=np.uint32)
        values = np.array([v for _, v in pairs], dtype=np.float32)
        return cls(dims, values)

    @property
    def nnz(self):
        return int(self.dims.size)

    def is_zero(self):
        return self.dims.size == 0

    def pairs(self):
        return list(zip(self.dims.tolist(), self.values.tolist()))

    def to_dense(self, dim, dtype=np.float64):
        out = np.zeros(dim, dtype=dtype)
        out[self.dims] = self.values
        return out

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (
            np.array_equal(self.dims, other.dims)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.dims.tobytes(), self.values.tobytes()))


EMPTY = SparseVector(np.empty(0, dtype=np.uint32), np.empty(0, dtype=np.float32))


def dot(u: SparseVector, v: SparseVector) -> float:
    """Inner product over the common support, accumulated in float64."""
    if u.dims.size == 0 or v.dims.size == 0:
        return 0.0
    _, iu, iv = np.intersect1d(u.dims, v.dims, assume_unique=True, return_indices=True)
    if iu.size == 0:
        return 0.0
    return float(u.values[iu].astype(np.float64) @ v.values[iv].astype(np.float64))


def lp_norm(u: SparseVector, p: int) -> float:
    """l1 or l2 mass of a sparse vector; 0 for the empty vector."""
    if p not in (1, 2):
        raise ValueError(f"unsupported norm order {p}")
    vals = u.values.astype(np.float64)
    if vals.size == 0:
        return 0.0
    if p == 1:
        return float(np.sum(vals))
    return float(np.sqrt(np.sum(vals * vals)))


def restrict(u: SparseVector, dims) -> SparseVector:
    """Keep exactly the entries of u whose dimension lies in `dims`."""
    if u.dims.size == 0:
        return u
    dim_arr = np.fromiter(dims, dtype=np.int64) if not isinstance(dims, np.ndarray) else dims
    mask = np.isin(u.dims.astype(np.int64), dim_arr)
    return SparseVector(u.dims[mask], u.values[mask])


class VectorSet:
    """Ordered collection of SparseVectors sharing an ambient dimensionality.

    Backed by CSR arrays; positions are the implicit 0-based ids.  Immutable
    after construction.
    """

    def __init__(self, dim, indptr, indices, values):
        self.dim = int(dim)
        self.indptr = _as_readonly(np.ascontiguousarray(indptr, dtype=np.uint64))
        self.indices = _as_readonly(np.ascontiguousarray(indices, dtype=np.uint32))
        self.values = _as_readonly(np.ascontiguousarray(values, dtype=np.float32))
        if self.indptr.size == 0 or self.indptr[0] != 0:
            raise SparseVectorError("indptr must start at 0")
        if int(self.indptr[-1]) != self.indices.size or self.indices.size != self.values.size:
            raise SparseVectorError("indptr/indices/values are inconsistent")
        if self.indices.size and int(self.indices.max()) >= self.dim:
            raise SparseVectorError("index exceeds ambient dimensionality")
        # cached float64 values for exact scoring
        self._values64 = _as_readonly(self.values.astype(np.float64))

    @classmethod
    def from_vectors(cls, dim, vectors):
        vectors = list(vectors)
        indptr = np.zeros(len(vectors) + 1, dtype=np.uint64)
        for j, v in enumerate(vectors):
            indptr[j + 1] = indptr[j] + v.dims.size
        if vectors:
            indices = np.concatenate([v.dims for v in vectors])
            values = np.concatenate([v.values for v in vectors])
        else:
            indices = np.empty(0, dtype=np.uint32)
            values = np.empty(0, dtype=np.float32)
        return cls(dim, indptr, indices, values)

    @classmethod
    def from_scipy(cls, mat):
        mat = sp.csr_matrix(mat)
        mat.sort_indices()
        mat.eliminate_zeros()
        return cls(mat.shape[1], mat.indptr, mat.indices, mat.data)

    def to_scipy(self, dtype=np.float32):
        return sp.csr_matrix(
            (self.values.astype(dtype), self.indices.astype(np.int64), self.indptr.astype(np.int64)),
            shape=(len(self), self.dim),
        )

    def scipy64(self):
        """Cached float64 CSR view for exact scoring."""
        if not hasattr(self, "_scipy64"):
            self._scipy64 = self.to_scipy(dtype=np.float64)
        return self._scipy64

    def __len__(self):
        return self.indptr.size - 1

    def vector(self, j) -> SparseVector:
        s, e = int(self.indptr[j]), int(self.indptr[j + 1])
        return SparseVector(self.indices[s:e], self.values[s:e])

    def __iter__(self):
        for j in range(len(self)):
            yield self.vector(j)

    def row_slice(self, j):
        """(dims, values64) views of row j for hot scoring paths."""
        s, e = int(self.indptr[j]), int(self.indptr[j + 1])
        return self.indices[s:e], self._values64[s:e]

    def nnz_per_row(self):
        return np.diff(self.indptr.astype(np.int64))

    def density(self, i) -> float:
        """Fraction of vectors with a nonzero i-th coordinate."""
        if not 0 <= i < self.dim:
            raise IndexError(f"dimension {i} out of range for ambient dim {self.dim}")
        if len(self) == 0:
            return 0.0
        return float(np.count_nonzero(self.indices == i)) / len(self)

    def __eq__(self, other):
        if not isinstance(other, VectorSet):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )
