"""Benchmark the numba kernels against their pure-numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--repeats 5]

Times the three hot kernels on corpus-scale workloads and prints a table.
The numba path is warmed up first so JIT compilation does not count.
"""

import argparse
import time

import numpy as np

from quantsearch import _kernels

try:
    from numba import njit  # noqa: F401

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def bench(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - started)
    return best


def bm25_workload(rng, n_docs=200_000, n_terms=8, postings_per_term=30_000):
    doc_len = rng.integers(3, 40, size=n_docs).astype(np.float64)
    idx = rng.integers(0, n_docs, size=n_terms * postings_per_term).astype(np.int32)
    tf = rng.integers(1, 6, size=len(idx)).astype(np.float64)
    idf = rng.uniform(0.2, 4.0, size=n_terms)
    offsets = np.arange(n_terms + 1, dtype=np.int64) * postings_per_term
    scores = np.zeros(n_docs)
    return scores, idx, tf, idf, offsets, doc_len, float(doc_len.mean()), 1.2, 0.75


def contrastive_workload(rng, dim=256, buckets=1 << 15, nnz=40):
    W = rng.standard_normal((dim, buckets))
    idx_a = rng.choice(buckets, size=nnz, replace=False).astype(np.int64)
    idx_b = rng.choice(buckets, size=nnz, replace=False).astype(np.int64)
    wgt = np.full(nnz, 1.0 / nnz)
    return W, idx_a, wgt.copy(), idx_b, wgt.copy(), 0.05, 0.5, True


def contrastive_many(fn, args, n=2000):
    def run(*a):
        for _ in range(n):
            fn(*a)

    return run


def dense_workload(rng, n=50_000, dim=256):
    emb = np.ascontiguousarray(rng.standard_normal((n, dim)))
    q = np.ascontiguousarray(rng.standard_normal(dim))
    return emb, q


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    rows = []

    w = bm25_workload(rng)
    numpy_t = bench(_kernels._bm25_accumulate_np, w, args.repeats)
    if HAS_NUMBA:
        from quantsearch._kernels import _bm25_accumulate_nb

        _bm25_accumulate_nb(*bm25_workload(rng, n_docs=100, postings_per_term=10))
        numba_t = bench(_bm25_accumulate_nb, w, args.repeats)
    else:
        numba_t = None
    rows.append(("bm25_accumulate (8 terms x 30k postings)", numpy_t, numba_t))

    w = contrastive_workload(rng)
    numpy_t = bench(contrastive_many(_kernels._contrastive_update_np, w), w, 1)
    if HAS_NUMBA:
        from quantsearch._kernels import _contrastive_update_nb

        _contrastive_update_nb(*contrastive_workload(rng, dim=4, buckets=64, nnz=3))
        numba_t = bench(contrastive_many(_contrastive_update_nb, w), w, 1)
    else:
        numba_t = None
    rows.append(("contrastive_update x 2000 (D=256, nnz=40)", numpy_t, numba_t))

    w = dense_workload(rng)
    numpy_t = bench(_kernels._dense_scores_np, w, args.repeats)
    if HAS_NUMBA:
        from quantsearch._kernels import _dense_scores_nb

        _dense_scores_nb(*dense_workload(rng, n=10))
        numba_t = bench(_dense_scores_nb, w, args.repeats)
    else:
        numba_t = None
    rows.append(("dense_scores (50k x 256 matvec)", numpy_t, numba_t))

    print(f"{'kernel':<44} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, np_t, nb_t in rows:
        if nb_t is None:
            print(f"{name:<44} {np_t * 1e3:>8.2f}ms {'n/a':>10} {'n/a':>8}")
        else:
            print(
                f"{name:<44} {np_t * 1e3:>8.2f}ms {nb_t * 1e3:>8.2f}ms"
                f" {np_t / nb_t:>7.1f}x"
            )
    if not HAS_NUMBA:
        print("numba not importable; only the fallback path was timed")


if __name__ == "__main__":
    main()
