"""Inverted index with BM25 ranking.

Scoring uses the classic formula with the Robertson idf floored at zero:

    idf(t)      = max(0, ln((N - df + 0.5) / (df + 0.5)))
    score(d, q) = sum over unique query terms of
                  idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * |d| / avgdl))

Only records sharing at least one query term are candidates.  Ties break
by record id ascending, so rankings are fully deterministic.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DuplicateId, SchemaVersionMismatch
from .tokenize import TokenizerConfig, index_tokenize

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75

_CACHE_SCHEMA = "quantsearch-bm25-cache"
_CACHE_VERSION = 1


@dataclass(frozen=True)
class ScoredHit:
    record_id: str
    score: float


class InvertedIndex:
    """Immutable BM25 index over (id, text) records."""

    def __init__(self, ids, postings, doc_len, avgdl, tokenizer_config, k1, b):
        self.ids = list(ids)                  # position -> record id
        self.postings = postings              # term -> (idx int32[], tf float64[])
        self.doc_len = doc_len                # float64[] token counts
        self.avgdl = avgdl
        self.tokenizer_config = tokenizer_config
        self.k1 = k1
        self.b = b
        self.n_docs = len(self.ids)
        self._idf = {
            term: max(0.0, float(np.log((self.n_docs - len(idx) + 0.5) / (len(idx) + 0.5))))
            for term, (idx, _) in postings.items()
        }

    def idf(self, term: str) -> float:
        return self._idf.get(term, 0.0)

    def search(self, query: str, k: int) -> list[ScoredHit]:
        if k < 1:
            raise ValueError("k must be >= 1")
        terms = sorted(set(index_tokenize(query, self.tokenizer_config)))
        rows = [(t, *self.postings[t]) for t in terms if t in self.postings]
        if not rows:
            return []
        scores = np.zeros(self.n_docs)
        idx_all = np.concatenate([idx for _, idx, _ in rows])
        tf_all = np.concatenate([tf for _, _, tf in rows])
        idf = np.array([self._idf[t] for t, _, _ in rows])
        offsets = np.zeros(len(rows) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([len(idx) for _, idx, _ in rows])
        _kernels.bm25_accumulate(
            scores, idx_all, tf_all, idf, offsets, self.doc_len,
            self.avgdl, self.k1, self.b,
        )
        candidates = np.unique(idx_all)
        ranked = sorted(
            ((float(scores[i]), self.ids[i]) for i in candidates),
            key=lambda pair: (-pair[0], pair[1]),
        )
        return [ScoredHit(rid, score) for score, rid in ranked[:k]]


def build_index(
    records,
    tokenizer_config: TokenizerConfig = TokenizerConfig(),
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> InvertedIndex:
    """Index (id, text) pairs; raises DuplicateId on repeated ids."""
    ids = []
    seen = set()
    term_docs: dict[str, list[tuple[int, int]]] = {}
    lengths = []
    for pos, (rid, text) in enumerate(records):
        if rid in seen:
            raise DuplicateId(f"record id {rid!r} appears twice")
        seen.add(rid)
        ids.append(rid)
        terms = index_tokenize(text, tokenizer_config)
        lengths.append(len(terms))
        counts: dict[str, int] = {}
        for t in terms:
            counts[t] = counts.get(t, 0) + 1
        for t, c in counts.items():
            term_docs.setdefault(t, []).append((pos, c))
    postings = {
        t: (
            np.array([p for p, _ in entries], dtype=np.int32),
            np.array([c for _, c in entries], dtype=np.float64),
        )
        for t, entries in term_docs.items()
    }
    doc_len = np.array(lengths, dtype=np.float64)
    avgdl = float(doc_len.mean()) if len(doc_len) else 0.0
    return InvertedIndex(ids, postings, doc_len, avgdl, tokenizer_config, k1, b)


def corpus_fingerprint(records, tokenizer_config: TokenizerConfig) -> str:
    h = hashlib.sha256()
    h.update(tokenizer_config.fingerprint().encode())
    for rid, text in records:
        h.update(rid.encode("utf-8"))
        h.update(b"\x00")
        h.update(text.encode("utf-8"))
        h.update(b"\x01")
    return h.hexdigest()


def save_index(index: InvertedIndex, path, fingerprint: str) -> None:
    """Write a binary cache keyed by corpus + tokenizer fingerprint."""
    terms = sorted(index.postings)
    arrays = {
        "doc_len": index.doc_len,
        "offsets": np.cumsum([0] + [len(index.postings[t][0]) for t in terms]),
        "idx": np.concatenate([index.postings[t][0] for t in terms])
        if terms else np.zeros(0, dtype=np.int32),
        "tf": np.concatenate([index.postings[t][1] for t in terms])
        if terms else np.zeros(0),
    }
    meta = {
        "schema": _CACHE_SCHEMA,
        "version": _CACHE_VERSION,
        "fingerprint": fingerprint,
        "tokenizer": index.tokenizer_config.fingerprint(),
        "ids": index.ids,
        "terms": terms,
        "avgdl": index.avgdl,
        "k1": index.k1,
        "b": index.b,
    }
    np.savez(path, meta=json.dumps(meta, ensure_ascii=False), **arrays)


def load_index(
    path, fingerprint: str, tokenizer_config: TokenizerConfig = TokenizerConfig()
) -> InvertedIndex | None:
    """Load a cache; None when the fingerprint or tokenizer changed."""
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        if meta.get("schema") != _CACHE_SCHEMA or meta.get("version") != _CACHE_VERSION:
            raise SchemaVersionMismatch(f"unsupported index cache at {path}")
        if meta["fingerprint"] != fingerprint:
            return None
        if meta["tokenizer"] != tokenizer_config.fingerprint():
            return None
        offsets = data["offsets"]
        idx, tf = data["idx"], data["tf"]
        postings = {
            t: (idx[offsets[i] : offsets[i + 1]], tf[offsets[i] : offsets[i + 1]])
            for i, t in enumerate(meta["terms"])
        }
        return InvertedIndex(
            meta["ids"], postings, data["doc_len"], meta["avgdl"],
            tokenizer_config, meta["k1"], meta["b"],
        )
