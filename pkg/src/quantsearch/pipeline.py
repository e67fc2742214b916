"""End-to-end orchestration: documents in, evaluated method table out.

This is the one place that wires the whole chain together: split the
documents, train the description tagger on the training side's labels,
parse everything into the corpora, mine pairs on the training records,
train the dense ranker, and evaluate every configured method on the
held-out queries.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from . import bm25, mining, ranker, tagger as tagger_mod
from .config import PipelineConfig
from .corpus import Corpus, build_corpus
from .engine import METHODS, SearchEngine, filter_for_queries
from .retrieval_eval import SuiteResult, run_method_suite


def split_doc_ids(doc_ids, train_fraction: float, seed: int = 0):
    """Deterministic doc split; train side gets floor(n*f + 0.5) docs."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    shuffled = list(doc_ids)
    random.Random(seed).shuffle(shuffled)
    n_train = math.floor(len(shuffled) * train_fraction + 0.5)
    return set(shuffled[:n_train]), set(shuffled[n_train:])


def select_queries(records, min_segments: int = 2, min_sig_digits: int = 2):
    """The query-quality filter: enough structure, enough precision."""
    return [
        r
        for r in records
        if len(r.segments) >= min_segments and r.value.sig_digits >= min_sig_digits
    ]


@dataclass
class PipelineResult:
    corpus: Corpus
    tagger: object
    tagger_report: object
    ranker_model: object
    base_model: object
    pairs: tuple
    mining_report: object
    queries: list
    suite: SuiteResult | None
    engine: SearchEngine | None
    train_doc_ids: set = field(default_factory=set)


def run_pipeline(
    docs,
    labels,
    config: PipelineConfig | None = None,
    methods: list[str] | None = None,
    include_pretrained_import: bool = False,
    evaluate: bool = True,
    max_tagger_examples: int = 400,
) -> PipelineResult:
    """docs: (doc_id, text) pairs; labels: (doc_id, LabeledExample) rows."""
    config = config or PipelineConfig()
    doc_ids = sorted({d for d, _ in docs})
    train_docs, _test_docs = split_doc_ids(doc_ids, config.train_fraction, config.seed)

    train_labels = [ex for d, ex in labels if d in train_docs][:max_tagger_examples]
    tagger, tagger_report = tagger_mod.train_tagger(
        train_labels, epochs=config.tagger_epochs, seed=config.seed
    )

    corpus, _build_report = build_corpus(
        docs, tagger, evidence_window=config.evidence_window,
        terminators=config.terminators, skip_years=config.skip_years,
    )

    train_records = [r for r in corpus.records if r.doc_id in train_docs]
    index = bm25.build_index(
        [(r.record_id, r.description_text) for r in train_records],
        k1=config.bm25_k1, b=config.bm25_b,
    )
    paraphrase, confusing, mine_report = mining.mine(
        train_records, index, k=config.mining_k, min_score=config.mining_min_score
    )

    base_model = ranker.HashedEmbeddingModel(
        dim=config.embedding_dim, n_buckets=config.embedding_buckets,
        seed=config.seed,
    )
    contrastive = ranker.ContrastiveConfig(
        margin=config.margin, max_negatives=config.max_negatives,
        epochs=config.ranker_epochs, learning_rate=config.learning_rate,
        seed=config.seed,
    )
    texts = {r.record_id: r.description_text for r in train_records}
    ws_model, _trace = ranker.train_contrastive(
        paraphrase, confusing, texts, contrastive, base_model=base_model
    )

    test_records = [r for r in corpus.records if r.doc_id not in train_docs]
    queries = select_queries(
        test_records, config.query_min_segments, config.query_min_sig_digits
    )

    suite = None
    engine = None
    if evaluate:
        searched = filter_for_queries(corpus, queries)
        models = {"dense": base_model, "dense_ws": ws_model}
        if include_pretrained_import:
            # stands in for vectors computed by some external encoder
            import_encoder = ranker.HashedEmbeddingModel(
                dim=config.embedding_dim, n_buckets=config.embedding_buckets,
                seed=config.seed + 101,
            )
            emb = {
                r.record_id: import_encoder.encode(r.description_text)
                for r in searched.records
            }
            emb.update(
                {q.record_id: import_encoder.encode(q.description_text) for q in queries}
            )
            models["dense_pre"] = ranker.PrecomputedEmbeddings(emb)
        engine = SearchEngine(
            searched, models, k1=config.bm25_k1, b=config.bm25_b
        )
        chosen = methods or [m for m in METHODS if engine.available(m)]
        suite = run_method_suite(engine, queries, chosen, n=config.eval_cutoff)

    return PipelineResult(
        corpus=corpus,
        tagger=tagger,
        tagger_report=tagger_report,
        ranker_model=ws_model,
        base_model=base_model,
        pairs=(paraphrase, confusing),
        mining_report=mine_report,
        queries=queries,
        suite=suite,
        engine=engine,
        train_doc_ids=train_docs,
    )
