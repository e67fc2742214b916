"""One search surface over all retrieval methods.

The CLI, the HTTP service, and the evaluation suite all rank through this
class, so their outputs are identical by construction.  Methods:

    cs-bm25        BM25 over whole sentences
    cq-bm25        BM25 over parsed descriptions
    cq-dense       cosine over untrained hashed embeddings
    cq-dense-pre   cosine over imported precomputed vectors
    cq-dense-ws    cosine over weak-supervision-trained embeddings
"""

from __future__ import annotations

from . import bm25, ranker
from .corpus import Corpus, QuantityRecord
from .errors import QuantsearchError
from .extract import normalize_value
from .retrieval_eval import auto_label_record, auto_label_sentence
from .tokenize import TokenizerConfig

METHODS = ("cs-bm25", "cq-bm25", "cq-dense", "cq-dense-pre", "cq-dense-ws")

_DENSE_MODEL_KEYS = {
    "cq-dense": "dense",
    "cq-dense-pre": "dense_pre",
    "cq-dense-ws": "dense_ws",
}


class SearchEngine:
    """Lazy per-method indexes over one corpus and a set of models.

    models maps "dense" / "dense_ws" to encoders and "dense_pre" to a
    PrecomputedEmbeddings instance; missing entries leave the matching
    method unavailable.
    """

    def __init__(
        self,
        corpus: Corpus,
        models: dict | None = None,
        k1: float = bm25.DEFAULT_K1,
        b: float = bm25.DEFAULT_B,
        tokenizer_config: TokenizerConfig = TokenizerConfig(),
    ):
        self.corpus = corpus
        self.models = models or {}
        self.k1 = k1
        self.b = b
        self.tokenizer_config = tokenizer_config
        self._indexes: dict[str, object] = {}

    def methods(self) -> list[dict]:
        return [
            {"name": m, "available": self.available(m)} for m in METHODS
        ]

    def available(self, method: str) -> bool:
        if method not in METHODS:
            return False
        key = _DENSE_MODEL_KEYS.get(method)
        return key is None or self.models.get(key) is not None

    def _index_for(self, method: str):
        if method not in METHODS:
            raise QuantsearchError(f"unknown method {method!r}")
        if not self.available(method):
            raise QuantsearchError(f"method {method!r} has no model configured")
        if method not in self._indexes:
            if method == "cs-bm25":
                records = [(s.key, s.text()) for s in self.corpus.sentences]
                self._indexes[method] = bm25.build_index(
                    records, self.tokenizer_config, self.k1, self.b
                )
            elif method == "cq-bm25":
                records = [
                    (r.record_id, r.description_text) for r in self.corpus.records
                ]
                self._indexes[method] = bm25.build_index(
                    records, self.tokenizer_config, self.k1, self.b
                )
            else:
                model = self.models[_DENSE_MODEL_KEYS[method]]
                self._indexes[method] = ranker.DenseIndex(self.corpus.records, model)
        return self._indexes[method]

    def search(self, method: str, query: str, k: int) -> list[bm25.ScoredHit]:
        """Ranked hits; ids are sentence keys for cs-bm25, record ids else.

        For cq-dense-pre the query must be a record id with an imported
        vector (free text has no encoder on that path).
        """
        return self._index_for(method).search(query, k)

    def search_eval(self, method: str, query: QuantityRecord, n: int) -> list[tuple[str, int]]:
        """Ranked (result id, auto label) rows for the evaluation harness."""
        text = query.record_id if method == "cq-dense-pre" else query.description_text
        hits = self.search(method, text, n)
        rows = []
        for hit in hits:
            if method == "cs-bm25":
                sentence = self.corpus.sentence_by_key(hit.record_id)
                label = auto_label_sentence(query, sentence)
                rows.append((f"s:{hit.record_id}", int(label)))
            else:
                record = self.corpus.record_by_id(hit.record_id)
                label = auto_label_record(query, record)
                rows.append((f"q:{hit.record_id}", int(label)))
        return rows

    def hit_details(self, method: str, hits) -> list[dict]:
        """Human-facing rows: rank, score, value, description, evidence.

        `surface` is the quantity's verbatim text, present inside
        `evidence`, so callers can highlight it.
        """
        out = []
        for rank, hit in enumerate(hits, 1):
            if method == "cs-bm25":
                s = self.corpus.sentence_by_key(hit.record_id)
                surface = s.quantities[0].surface if s.quantities else ""
                value = normalize_value(surface).render() if surface else ""
                out.append(
                    {
                        "rank": rank,
                        "score": hit.score,
                        "record_id": hit.record_id,
                        "value": value,
                        "surface": surface,
                        "description": s.text(),
                        "evidence": s.text(),
                        "doc_id": s.doc_id,
                        "sentence_id": s.sentence_id,
                    }
                )
            else:
                r = self.corpus.record_by_id(hit.record_id)
                host = self.corpus.sentence_by_key(f"{r.doc_id}:{r.sentence_id}")
                surface = (
                    " ".join(host.tokens[r.pivot[0] : r.pivot[1]]) if host else ""
                )
                out.append(
                    {
                        "rank": rank,
                        "score": hit.score,
                        "record_id": r.record_id,
                        "value": r.value.render(),
                        "surface": surface,
                        "description": r.description_text,
                        "evidence": r.evidence,
                        "doc_id": r.doc_id,
                        "sentence_id": r.sentence_id,
                    }
                )
        return out


def filter_for_queries(corpus: Corpus, queries: list[QuantityRecord]) -> Corpus:
    """Corpus with the query records (and their host sentences) removed,
    so no method can trivially return the query itself."""
    query_ids = {q.record_id for q in queries}
    query_sentences = {(q.doc_id, q.sentence_id) for q in queries}
    return Corpus(
        sentences=[
            s for s in corpus.sentences
            if (s.doc_id, s.sentence_id) not in query_sentences
        ],
        records=[r for r in corpus.records if r.record_id not in query_ids],
    )
