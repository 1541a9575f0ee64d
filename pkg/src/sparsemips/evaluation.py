"""Exact oracle, retrieval metrics, dataset statistics, and benchmarking."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .query import ResultList, SearchParams, search
from .sketching import alpha_mss
from .vectors import SparseVector, VectorSet, dot, lp_norm, restrict


@dataclass(frozen=True)
class GroundTruth:
    k: int
    ids: np.ndarray      # (nq, k) uint32
    scores: np.ndarray   # (nq, k) float32

    @property
    def num_queries(self):
        return self.ids.shape[0]


def exact_topk(vset: VectorSet, q: SparseVector, k: int) -> ResultList:
    """Exhaustive scoring, sorted by (score desc, id asc), truncated to k."""
    if len(vset) == 0:
        raise ValueError("cannot search an empty collection")
    if k < 1:
        raise ValueError("k must be positive")
    scores = vset.scipy64() @ q.to_dense(vset.dim)
    order = np.lexsort((np.arange(len(vset)), -scores))[:k]
    return ResultList(order, scores[order])


def ground_truth(vset: VectorSet, queries: VectorSet, k: int) -> GroundTruth:
    if k > len(vset):
        raise ValueError(f"k={k} exceeds collection size {len(vset)}")
    ids = np.empty((len(queries), k), dtype=np.uint32)
    scores = np.empty((len(queries), k), dtype=np.float32)
    for qi, q in enumerate(queries):
        res = exact_topk(vset, q, k)
        ids[qi] = res.ids
        scores[qi] = res.scores
    return GroundTruth(k=k, ids=ids, scores=scores)


def accuracy_at_k(truth_ids, run_ids, k) -> float:
    """|true top-k  intersect  returned top-k| / k by id sets."""
    truth_ids = np.asarray(truth_ids)
    if truth_ids.size < k:
        raise ValueError(f"ground truth depth {truth_ids.size} is less than k={k}")
    truth = set(int(i) for i in truth_ids[:k])
    run = set(int(i) for i in np.asarray(run_ids)[:k])
    return len(truth & run) / k


def mean_accuracy(gt: GroundTruth, runs, k) -> float:
    """runs: per query, a sequence of (id, score) pairs."""
    accs = [
        accuracy_at_k(gt.ids[qi], [doc for doc, _ in run[:k]], k)
        for qi, run in enumerate(runs)
    ]
    return float(np.mean(accs)) if accs else 0.0


def mass_curve(vset: VectorSet, max_keep: int):
    """Mean fraction of l1 mass kept by the top-j entries, for j = 1..max_keep."""
    if len(vset) == 0:
        raise ValueError("empty collection")
    fractions = np.zeros(max_keep, dtype=np.float64)
    counted = 0
    for v in vset:
        if v.dims.size == 0:
            continue
        vals = np.sort(v.values.astype(np.float64))[::-1]
        csum = np.cumsum(vals) / vals.sum()
        row = np.ones(max_keep)
        upto = min(max_keep, vals.size)
        row[:upto] = csum[:upto]
        fractions += row
        counted += 1
    if counted == 0:
        raise ValueError("collection holds only empty vectors")
    return [(j + 1, fractions[j] / counted) for j in range(max_keep)]


def ip_preservation(vset, queries, alpha_doc, alpha_query, sample, seed=0):
    """Mean fraction of inner product kept by top-mass sketching both sides.

    Samples (query, doc) pairs, keeps those with a positive true product, and
    reports mean of sketched/true with a 95% normal-approximation CI.
    """
    rng = np.random.default_rng(seed)
    qs = rng.integers(0, len(queries), size=sample)
    ds = rng.integers(0, len(vset), size=sample)
    fractions = []
    for qi, di in zip(qs.tolist(), ds.tolist()):
        q, u = queries.vector(qi), vset.vector(di)
        if q.dims.size == 0 or u.dims.size == 0:
            continue
        true = dot(q, u)
        if true <= 0:
            continue
        est = dot(alpha_mss(q, alpha_query), alpha_mss(u, alpha_doc))
        fractions.append(est / true)
    if not fractions:
        raise ValueError("no sampled pair has a positive inner product")
    arr = np.asarray(fractions)
    mean = float(arr.mean())
    half = float(1.96 * arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
    return mean, half, arr.size


def norm_ratio_cdf(vset, queries, k_far):
    """CDF of ||v_I||1 / ||u_I||1: u nearest, v the k_far-th nearest, I = query support."""
    ratios = []
    for q in queries:
        if q.dims.size == 0:
            continue
        res = exact_topk(vset, q, k_far)
        if len(res) < k_far:
            continue
        support = q.dims
        u = restrict(vset.vector(int(res.ids[0])), support)
        v = restrict(vset.vector(int(res.ids[k_far - 1])), support)
        nu = lp_norm(u, 1)
        if nu == 0:
            continue
        ratios.append(lp_norm(v, 1) / nu)
    ratios = np.sort(np.asarray(ratios))
    return [(float(r), (i + 1) / ratios.size) for i, r in enumerate(ratios)]


@dataclass(frozen=True)
class BenchReport:
    per_query_us: np.ndarray
    repetitions: int

    @property
    def mean_us(self):
        return float(np.mean(self.per_query_us)) if self.per_query_us.size else 0.0

    @property
    def median_us(self):
        return float(np.median(self.per_query_us)) if self.per_query_us.size else 0.0

    @property
    def p95_us(self):
        return float(np.percentile(self.per_query_us, 95)) if self.per_query_us.size else 0.0


def bench(index, graph, queries, params: SearchParams, repetitions=3) -> BenchReport:
    """Single-worker wall time around the search call, best of `repetitions`."""
    times = []
    for q in queries:
        if q.dims.size == 0:
            continue
        best = np.inf
        for _ in range(repetitions):
            t0 = time.perf_counter_ns()
            search(index, graph, q, params)
            best = min(best, time.perf_counter_ns() - t0)
        times.append(best / 1000.0)
    return BenchReport(per_query_us=np.asarray(times), repetitions=repetitions)
