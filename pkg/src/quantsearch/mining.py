"""Mining paraphrase and confusing description pairs by value coincidence.

Every record's description is issued as a BM25 query against the whole
description corpus.  Candidates that share the record's quantity value are
paraphrase pairs; the rest are confusing pairs (textually similar, value
differs).  Pairs are stored with i < j and deduplicated across the two
directions a pair can be discovered from.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

from .bm25 import InvertedIndex
from .errors import IndexCorpusMismatch
from .extract import same_value

DEFAULT_TOP_K = 10

PARAPHRASE = "paraphrase"
CONFUSING = "confusing"


@dataclass(frozen=True)
class MinedPair:
    i: str  # record ids, i < j lexicographically
    j: str
    score: float  # BM25 score at mining time
    query_id: str  # the side whose search discovered the pair first

    def to_json(self, label: str) -> str:
        return json.dumps(
            {"i": self.i, "j": self.j, "label": label, "score": self.score},
            ensure_ascii=False,
        )


@dataclass
class MiningReport:
    query_count: int
    candidate_count: int  # unique pairs after self-hit removal and dedup
    paraphrase_count: int
    confusing_count: int
    directed_candidates: int  # raw BM25 results before dedup

    def to_json(self) -> str:
        return json.dumps(self.__dict__)


def mine(
    records,
    index: InvertedIndex,
    k: int = DEFAULT_TOP_K,
    min_score: float | None = None,
) -> tuple[list[MinedPair], list[MinedPair], MiningReport]:
    """Run the value-coincidence pass; returns (paraphrase, confusing, report)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ids = {r.record_id for r in records}
    if ids != set(index.ids):
        raise IndexCorpusMismatch("index ids do not match the corpus records")
    by_id = {r.record_id: r for r in records}

    paraphrase: list[MinedPair] = []
    confusing: list[MinedPair] = []
    seen: set[tuple[str, str]] = set()
    directed = 0
    for rec in records:
        hits = index.search(rec.description_text, k + 1)
        candidates = [h for h in hits if h.record_id != rec.record_id][:k]
        for hit in candidates:
            if min_score is not None and hit.score < min_score:
                continue
            directed += 1
            key = (
                (rec.record_id, hit.record_id)
                if rec.record_id < hit.record_id
                else (hit.record_id, rec.record_id)
            )
            if key in seen:
                continue
            seen.add(key)
            pair = MinedPair(key[0], key[1], hit.score, rec.record_id)
            if same_value(rec.value, by_id[hit.record_id].value):
                paraphrase.append(pair)
            else:
                confusing.append(pair)
    report = MiningReport(
        query_count=len(records),
        candidate_count=len(seen),
        paraphrase_count=len(paraphrase),
        confusing_count=len(confusing),
        directed_candidates=directed,
    )
    return paraphrase, confusing, report


def save_pairs(paraphrase, confusing, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pair in paraphrase:
            fh.write(pair.to_json(PARAPHRASE) + "\n")
        for pair in confusing:
            fh.write(pair.to_json(CONFUSING) + "\n")


def load_pairs(path) -> tuple[list[MinedPair], list[MinedPair]]:
    paraphrase, confusing = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            pair = MinedPair(obj["i"], obj["j"], obj["score"], obj["i"])
            (paraphrase if obj["label"] == PARAPHRASE else confusing).append(pair)
    return paraphrase, confusing


def estimate_same_fact_probability(
    n_records: float,
    vocabulary_size: float,
    terms_per_description: float,
    sig_digits: float,
    records_per_fact: float,
) -> float:
    """Chance that two value-coinciding, textually similar records state
    the same fact: 1 / (1 + N / (V^l * 10^s * r))."""
    args = (n_records, vocabulary_size, terms_per_description, sig_digits, records_per_fact)
    if any(a <= 0 for a in args):
        raise ValueError("all estimator arguments must be positive")
    log_ratio = (
        math.log10(n_records)
        - terms_per_description * math.log10(vocabulary_size)
        - sig_digits
        - math.log10(records_per_fact)
    )
    if log_ratio > 300:
        return 0.0
    return 1.0 / (1.0 + 10.0 ** log_ratio)


def split_by_document(records, train_fraction: float, seed: int = 0):
    """Document-granularity split: every record of a doc lands on one side.

    The train side gets floor(n_docs * fraction + 0.5) documents.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    doc_ids = []
    seen = set()
    for r in records:
        if r.doc_id not in seen:
            seen.add(r.doc_id)
            doc_ids.append(r.doc_id)
    rng = random.Random(seed)
    shuffled = doc_ids[:]
    rng.shuffle(shuffled)
    n_train = math.floor(len(shuffled) * train_fraction + 0.5)
    train_docs = set(shuffled[:n_train])
    train = [r for r in records if r.doc_id in train_docs]
    test = [r for r in records if r.doc_id not in train_docs]
    return train, test
