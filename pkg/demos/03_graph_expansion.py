"""Recovering pruning losses with one-hop neighbor-graph expansion.

Aggressive pruning occasionally drops a true top-k vector.  A k-nearest-
neighbor graph (by inner product) lets the engine take one hop from every
surviving candidate, which often re-finds exactly the vectors pruning lost —
at a small, bounded extra cost.
"""
import numpy as np

from sparsemips import (
    BuildParams,
    SearchParams,
    accuracy_at_k,
    build_exact_graph,
    build_index,
    exact_topk,
    graph_size_bits,
    search,
)
from sparsemips.synth import zipfian_clustered_collection, zipfian_queries


def main():
    vset, _, info = zipfian_clustered_collection(2000, 500, 30, n_clusters=20, seed=1)
    queries = zipfian_queries(info, 50, 500, 12, seed=2)
    index = build_index(vset, BuildParams(alpha=0.35, beta=0.2, gamma=0.5, seed=0))
    truth = [exact_topk(vset, q, 10) for q in queries]

    print(f"{'kappa':>5}  {'accuracy@10':>11}  {'scored/query':>12}  {'graph bits/vector':>17}")
    for kappa in (0, 2, 5, 10, 20):
        graph = build_exact_graph(vset, kappa) if kappa else None
        params = SearchParams(k=10, alpha_q=0.6, heap_factor=0.8, use_graph=kappa > 0)
        accs, evals = [], []
        for q, expected in zip(queries, truth):
            got, stats = search(index, graph, q, params, return_stats=True)
            accs.append(accuracy_at_k(expected.ids, got.ids, 10))
            evals.append(stats.forward_evaluations)
        bits = graph_size_bits(len(vset), kappa) / len(vset) if kappa else 0
        print(f"{kappa:>5}  {np.mean(accs):>11.3f}  {np.mean(evals):>12.0f}  {bits:>17.0f}")

    print("\naccuracy climbs monotonically with kappa (expansion can only add")
    print("candidates), while the memory cost grows linearly in kappa")


if __name__ == "__main__":
    main()
