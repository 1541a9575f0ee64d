"""Top-k query processing over a blocked inverted index.

Traversal: sketch the query, walk the inverted lists of its surviving
dimensions, rank blocks by summary score against the full query, skip a
block (and, under descending order, the rest of its list) once the heap is
full and the summary score drops below heap.min()/heap_factor, fully
evaluate visited blocks against the forward index, and optionally expand
the candidate heap one hop through the neighbor graph.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .sketching import ZeroVectorError, alpha_mss
from .vectors import SparseVector


@dataclass(frozen=True)
class SearchParams:
    k: int
    alpha_q: float = 1.0
    heap_factor: float = 1.0
    use_graph: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if not 0 < self.alpha_q <= 1:
            raise ValueError("alpha_q must lie in (0, 1]")
        if not 0 < self.heap_factor <= 1:
            raise ValueError("heap_factor must lie in (0, 1]")


class ResultList:
    """(id, score) pairs, score descending, ties by ascending id."""

    def __init__(self, ids, scores):
        self.ids = np.ascontiguousarray(ids, dtype=np.uint32)
        self.scores = np.ascontiguousarray(scores, dtype=np.float32)

    @classmethod
    def from_heap(cls, heap):
        ordered = sorted(heap, reverse=True)  # (score, -id): desc score, asc id
        return cls([-nid for _, nid in ordered], [s for s, _ in ordered])

    def __len__(self):
        return self.ids.size

    def __iter__(self):
        for doc, score in zip(self.ids.tolist(), self.scores.tolist()):
            yield doc, float(score)

    def pairs(self):
        return list(self)

    def __eq__(self, other):
        if not isinstance(other, ResultList):
            return NotImplemented
        return np.array_equal(self.ids, other.ids) and np.array_equal(self.scores, other.scores)


@dataclass
class SearchStats:
    forward_evaluations: int = 0
    blocks_visited: int = 0
    blocks_skipped: int = 0
    evaluated_ids: set = field(default_factory=set)


def _heap_offer(heap, k, score, doc):
    """Keep the best k entries; ties at the boundary favor the smaller id."""
    entry = (score, -doc)
    if len(heap) < k:
        heapq.heappush(heap, entry)
    elif entry > heap[0]:
        heapq.heapreplace(heap, entry)


def evaluate_block(block, forward, q_dense, heap, visited, k, stats=None):
    """Exactly score every unvisited member of a block and update the heap."""
    ids = block.ids[~visited[block.ids]]
    visited[ids] = True
    for doc in ids.tolist():
        dims, vals = forward.row_slice(doc)
        score = float(vals @ q_dense[dims])
        _heap_offer(heap, k, score, doc)
    if stats is not None:
        stats.forward_evaluations += ids.size
        stats.evaluated_ids.update(ids.tolist())
    return heap


def expand_with_graph(heap, graph, forward, q_dense, k, visited, stats=None):
    """One-hop expansion: score unvisited neighbors of heap members."""
    if graph is None or graph.kappa == 0:
        return heap
    snapshot = [-nid for _, nid in heap]
    for doc in snapshot:
        for nb in graph.neighbors[doc].tolist():
            if visited[nb]:
                continue
            visited[nb] = True
            dims, vals = forward.row_slice(nb)
            score = float(vals @ q_dense[dims])
            _heap_offer(heap, k, score, nb)
            if stats is not None:
                stats.forward_evaluations += 1
                stats.evaluated_ids.add(nb)
    return heap


def search(index, graph, q: SparseVector, params: SearchParams, return_stats=False):
    """Approximate top-k by inner product; exact when no pruning layer is on."""
    if q.dims.size == 0:
        raise ZeroVectorError("query must be nonzero")
    forward = index.forward
    n = len(forward)
    q_dense = q.to_dense(index.dim, dtype=np.float64)
    q_sketch = alpha_mss(q, params.alpha_q)
    # traverse high-value query dimensions first to fill the heap early
    dim_order = q_sketch.dims[np.argsort(-q_sketch.values, kind="stable")]

    heap = []
    visited = np.zeros(n, dtype=bool)
    stats = SearchStats()
    for dim in dim_order.tolist():
        blocks = index.lists[dim]
        if not blocks:
            continue
        r = np.empty(len(blocks))
        for j, b in enumerate(blocks):
            sdims, svals = b.summary_arrays()
            r[j] = svals @ q_dense[sdims]
        order = np.lexsort((np.arange(len(blocks)), -r))
        for pos, j in enumerate(order.tolist()):
            if len(heap) == params.k and r[j] < heap[0][0] / params.heap_factor:
                # remaining blocks in this list have smaller summary scores
                stats.blocks_skipped += len(blocks) - pos
                break
            stats.blocks_visited += 1
            evaluate_block(blocks[j], forward, q_dense, heap, visited, params.k, stats)

    if len(heap) < min(params.k, n):
        # fewer candidates than requested (k near N, or degenerate pruning):
        # fall back to exact evaluation of everything not yet seen
        for doc in np.flatnonzero(~visited).tolist():
            visited[doc] = True
            dims, vals = forward.row_slice(doc)
            score = float(vals @ q_dense[dims])
            _heap_offer(heap, params.k, score, doc)
            stats.forward_evaluations += 1
            stats.evaluated_ids.add(doc)

    if params.use_graph and graph is not None and graph.kappa > 0:
        expand_with_graph(heap, graph, forward, q_dense, params.k, visited, stats)

    result = ResultList.from_heap(heap)
    if return_stats:
        return result, stats
    return result
