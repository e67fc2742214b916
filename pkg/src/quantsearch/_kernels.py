"""Hot numeric kernels: numba @njit with a pure-numpy fallback.

Set QUANTSEARCH_PURE_NUMPY=1 to force the numpy path (it is also taken
automatically when numba is not importable).  Both paths compute the same
formulas; benchmarks/bench_kernels.py compares their throughput.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_enabled() -> bool:
    if os.environ.get("QUANTSEARCH_PURE_NUMPY", "").strip().lower() in ("1", "true", "yes"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USE_NUMBA = _numba_enabled()


def _bm25_accumulate_np(scores, doc_idx, tf, idf_per_term, offsets, doc_len, avgdl, k1, b):
    for t in range(len(offsets) - 1):
        lo, hi = offsets[t], offsets[t + 1]
        idx = doc_idx[lo:hi]
        f = tf[lo:hi]
        denom = f + k1 * (1.0 - b + b * doc_len[idx] / avgdl)
        np.add.at(scores, idx, idf_per_term[t] * f * (k1 + 1.0) / denom)


def _contrastive_embed_np(W, idx, wgt):
    return W[:, idx] @ wgt


def _contrastive_update_np(W, idx_a, wgt_a, idx_b, wgt_b, lr, margin, positive):
    u = W[:, idx_a] @ wgt_a
    v = W[:, idx_b] @ wgt_b
    nu = float(np.sqrt(u @ u))
    nv = float(np.sqrt(v @ v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    s = float(u @ v) / (nu * nv)
    if positive:
        loss = (1.0 - s) ** 2
        dl_ds = -2.0 * (1.0 - s)
    else:
        if s <= margin:
            return 0.0
        loss = (s - margin) ** 2
        dl_ds = 2.0 * (s - margin)
    ds_du = v / (nu * nv) - (s / (nu * nu)) * u
    ds_dv = u / (nu * nv) - (s / (nv * nv)) * v
    ga = (-lr * dl_ds) * ds_du
    gb = (-lr * dl_ds) * ds_dv
    np.add.at(W, (slice(None), idx_a), ga[:, None] * wgt_a[None, :])
    np.add.at(W, (slice(None), idx_b), gb[:, None] * wgt_b[None, :])
    return loss


def _dense_scores_np(emb, q):
    return emb @ q


if USE_NUMBA:
    from numba import njit, prange

    @njit(cache=True)
    def _bm25_accumulate_nb(scores, doc_idx, tf, idf_per_term, offsets, doc_len, avgdl, k1, b):
        for t in range(len(offsets) - 1):
            idf = idf_per_term[t]
            for p in range(offsets[t], offsets[t + 1]):
                d = doc_idx[p]
                f = tf[p]
                denom = f + k1 * (1.0 - b + b * doc_len[d] / avgdl)
                scores[d] += idf * f * (k1 + 1.0) / denom

    @njit(cache=True)
    def _contrastive_update_nb(W, idx_a, wgt_a, idx_b, wgt_b, lr, margin, positive):
        D = W.shape[0]
        u = np.zeros(D)
        v = np.zeros(D)
        for j in range(len(idx_a)):
            col = idx_a[j]
            w = wgt_a[j]
            for d in range(D):
                u[d] += W[d, col] * w
        for j in range(len(idx_b)):
            col = idx_b[j]
            w = wgt_b[j]
            for d in range(D):
                v[d] += W[d, col] * w
        nu = np.sqrt(np.dot(u, u))
        nv = np.sqrt(np.dot(v, v))
        if nu == 0.0 or nv == 0.0:
            return 0.0
        s = np.dot(u, v) / (nu * nv)
        if positive:
            loss = (1.0 - s) ** 2
            dl_ds = -2.0 * (1.0 - s)
        else:
            if s <= margin:
                return 0.0
            loss = (s - margin) ** 2
            dl_ds = 2.0 * (s - margin)
        for d in range(D):
            ga = -lr * dl_ds * (v[d] / (nu * nv) - s * u[d] / (nu * nu))
            for j in range(len(idx_a)):
                W[d, idx_a[j]] += ga * wgt_a[j]
        for d in range(D):
            gb = -lr * dl_ds * (u[d] / (nu * nv) - s * v[d] / (nv * nv))
            for j in range(len(idx_b)):
                W[d, idx_b[j]] += gb * wgt_b[j]
        return loss

    @njit(cache=True, parallel=True)
    def _dense_scores_nb(emb, q):
        n = emb.shape[0]
        out = np.empty(n)
        for i in prange(n):
            acc = 0.0
            for d in range(emb.shape[1]):
                acc += emb[i, d] * q[d]
            out[i] = acc
        return out

    bm25_accumulate = _bm25_accumulate_nb
    contrastive_update = _contrastive_update_nb
    dense_scores = _dense_scores_nb
else:
    bm25_accumulate = _bm25_accumulate_np
    contrastive_update = _contrastive_update_np
    dense_scores = _dense_scores_np
