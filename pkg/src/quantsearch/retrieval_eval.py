"""Retrieval evaluation: automatic relevance labeling by value match,
result pooling across methods, Exist@n / MAP@n / nDCG@n, and the pairwise
win matrix.

Labels are binary.  For description-corpus methods a result is relevant
when its value coincides with the query's; for the sentence-corpus
baseline a sentence is relevant when any quantity in it coincides, which
deliberately hands that baseline an edge.  Per query, the relevant results
of all methods are pooled; queries whose pool stays empty are dropped.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .corpus import QuantityRecord, SentenceRecord
from .errors import MethodQueryMismatch
from .extract import NormalizedValue, normalize_value, same_value


@dataclass(frozen=True)
class RelevanceList:
    """One method's labeled result list for one query."""

    query_id: str
    labels: tuple[int, ...]
    total_relevant: int  # |REL|: relevant results in the pool

    def __post_init__(self):
        if any(l not in (0, 1) for l in self.labels):
            raise ValueError("labels must be binary")
        if self.total_relevant < sum(self.labels):
            raise ValueError("pool cannot hold fewer relevant results than the list")


def auto_label_record(query: QuantityRecord, result: QuantityRecord) -> bool:
    return same_value(query.value, result.value)


def sentence_values(sentence: SentenceRecord, lexicon=None) -> list[NormalizedValue]:
    return [normalize_value(q.surface, lexicon) for q in sentence.quantities]


def auto_label_sentence(query: QuantityRecord, sentence: SentenceRecord, lexicon=None) -> bool:
    return any(same_value(query.value, v) for v in sentence_values(sentence, lexicon))


def auto_label(query: QuantityRecord, result, granularity: str = "record", lexicon=None) -> bool:
    """Binary relevance by value coincidence.

    granularity "record" compares the result record's value; "sentence"
    accepts a match on any quantity in the result sentence.
    """
    if granularity == "record":
        return auto_label_record(query, result)
    if granularity == "sentence":
        if isinstance(result, SentenceRecord):
            return auto_label_sentence(query, result, lexicon)
        raise TypeError("sentence granularity needs a SentenceRecord result")
    raise ValueError(f"unknown granularity {granularity!r}")


@dataclass
class PooledQuerySet:
    """Union of relevant result ids per query, plus each method's lists."""

    pools: dict  # query id -> set of relevant result ids
    results: dict  # method -> query id -> list of (result id, label)


def pool_and_filter(results_by_method: dict) -> PooledQuerySet:
    """Merge relevant ids across methods; drop queries with empty pools.

    results_by_method: method -> query id -> list of (result id, 0/1).
    Raises MethodQueryMismatch unless all methods cover the same queries.
    """
    methods = list(results_by_method)
    if not methods:
        return PooledQuerySet(pools={}, results={})
    query_sets = [set(results_by_method[m]) for m in methods]
    if any(qs != query_sets[0] for qs in query_sets[1:]):
        raise MethodQueryMismatch("methods were run on different query sets")
    pools: dict = {}
    for qid in query_sets[0]:
        pool = set()
        for m in methods:
            pool.update(rid for rid, label in results_by_method[m][qid] if label == 1)
        if pool:
            pools[qid] = pool
    kept = {
        m: {qid: rows for qid, rows in results_by_method[m].items() if qid in pools}
        for m in methods
    }
    return PooledQuerySet(pools=pools, results=kept)


def relevance_lists(pooled: PooledQuerySet, method: str, n: int) -> list[RelevanceList]:
    lists = []
    for qid in sorted(pooled.pools):
        rows = pooled.results[method][qid][:n]
        lists.append(
            RelevanceList(
                query_id=qid,
                labels=tuple(label for _, label in rows),
                total_relevant=len(pooled.pools[qid]),
            )
        )
    return lists


def exist_at_n(lists, n: int) -> float:
    """Fraction of queries with a relevant result in the top n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not lists:
        return 0.0
    return sum(1 in rl.labels[:n] for rl in lists) / len(lists)


def _ap_at_n(labels, n: int) -> float:
    labels = labels[:n]
    relevant = sum(labels)
    if relevant == 0:
        return 0.0  # in-list denominator is zero
    total = 0.0
    hits = 0
    for i, label in enumerate(labels, 1):
        hits += label
        if label:
            total += hits / i
    return total / relevant


def map_at_n(lists, n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    if not lists:
        return 0.0
    return sum(_ap_at_n(rl.labels, n) for rl in lists) / len(lists)


def _ndcg_at_n(rl: RelevanceList, n: int) -> float:
    dcg = sum(
        label / math.log2(i + 1)
        for i, label in enumerate(rl.labels[:n], 1)
    )
    ideal = min(rl.total_relevant, n)
    if ideal == 0:
        return 0.0
    idcg = sum(1.0 / math.log2(i + 1) for i in range(1, ideal + 1))
    return dcg / idcg


def ndcg_at_n(lists, n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    if not lists:
        return 0.0
    return sum(_ndcg_at_n(rl, n) for rl in lists) / len(lists)


def per_query_ndcg(pooled: PooledQuerySet, method: str, n: int) -> dict[str, float]:
    return {rl.query_id: _ndcg_at_n(rl, n) for rl in relevance_lists(pooled, method, n)}


def win_matrix(per_query: dict[str, dict[str, float]]) -> tuple[list[str], list[list[float]]]:
    """W[i][j]: fraction of queries where method i's nDCG strictly beats
    method j's.  Ties count for neither side; the diagonal stays zero."""
    methods = list(per_query)
    if not methods:
        return [], []
    qids = set(per_query[methods[0]])
    if any(set(per_query[m]) != qids for m in methods[1:]):
        raise MethodQueryMismatch("win matrix needs one score per query per method")
    matrix = [[0.0] * len(methods) for _ in methods]
    if not qids:
        return methods, matrix
    for a, ma in enumerate(methods):
        for b, mb in enumerate(methods):
            if a == b:
                continue
            wins = sum(per_query[ma][q] > per_query[mb][q] for q in qids)
            matrix[a][b] = wins / len(qids)
    return methods, matrix


@dataclass
class MethodMetrics:
    method: str
    exist_at_1: float
    exist_at_10: float
    map_at_10: float
    ndcg_at_10: float
    queries: int
    error: str | None = None


@dataclass
class SuiteResult:
    rows: list[MethodMetrics]
    win_methods: list[str] = field(default_factory=list)
    win: list[list[float]] = field(default_factory=list)
    pooled_queries: int = 0

    def table(self) -> str:
        header = f"{'method':<14} {'Exist@1':>8} {'Exist@10':>9} {'MAP@10':>8} {'nDCG@10':>8}"
        lines = [header]
        for r in self.rows:
            if r.error:
                lines.append(f"{r.method:<14} failed: {r.error}")
            else:
                lines.append(
                    f"{r.method:<14} {r.exist_at_1:>8.4f} {r.exist_at_10:>9.4f}"
                    f" {r.map_at_10:>8.4f} {r.ndcg_at_10:>8.4f}"
                )
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(
            {
                "pooled_queries": self.pooled_queries,
                "methods": [r.__dict__ for r in self.rows],
                "win_matrix": {"methods": self.win_methods, "values": self.win},
            },
            indent=2,
        )

    def win_csv(self) -> str:
        lines = ["method," + ",".join(self.win_methods)]
        for name, row in zip(self.win_methods, self.win):
            lines.append(name + "," + ",".join(f"{v:.4f}" for v in row))
        return "\n".join(lines) + "\n"


def load_manual_labels(path) -> dict[tuple[str, str], int]:
    """Manual relevance file: lines of "query_id<TAB>result_id<TAB>0|1"."""
    labels = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3 or parts[2] not in ("0", "1"):
                raise ValueError(f"{path}:{lineno}: expected 'query<TAB>result<TAB>0|1'")
            labels[(parts[0], parts[1])] = int(parts[2])
    return labels


def run_method_suite(
    engine,
    queries: list[QuantityRecord],
    methods: list[str],
    n: int = 10,
    manual_labels: dict[tuple[str, str], int] | None = None,
) -> SuiteResult:
    """Evaluate each method over the query set at cutoff n.

    `engine` must expose search_eval(method, query_record, n) returning a
    list of (result_id, label) with labels already assigned by value
    coincidence; manual labels, when given, override them.  The engine is
    expected to have been built on a corpus with the queries removed.
    A method that raises is reported as failed and the suite continues.
    """
    raw: dict[str, dict[str, list[tuple[str, int]]]] = {}
    errors: dict[str, str] = {}
    for method in methods:
        per_query: dict[str, list[tuple[str, int]]] = {}
        try:
            for query in queries:
                rows = engine.search_eval(method, query, n)
                if manual_labels is not None:
                    rows = [
                        (rid, manual_labels.get((query.record_id, rid), 0))
                        for rid, _ in rows
                    ]
                per_query[query.record_id] = rows
            raw[method] = per_query
        except Exception as exc:
            errors[method] = f"{type(exc).__name__}: {exc}"

    pooled = pool_and_filter(raw) if raw else PooledQuerySet({}, {})
    result = SuiteResult(rows=[], pooled_queries=len(pooled.pools))
    per_query_scores: dict[str, dict[str, float]] = {}
    for method in methods:
        if method in errors:
            result.rows.append(MethodMetrics(method, 0, 0, 0, 0, 0, error=errors[method]))
            continue
        lists = relevance_lists(pooled, method, n)
        result.rows.append(
            MethodMetrics(
                method=method,
                exist_at_1=exist_at_n(lists, 1),
                exist_at_10=exist_at_n(lists, min(10, n)),
                map_at_10=map_at_n(lists, min(10, n)),
                ndcg_at_10=ndcg_at_n(lists, min(10, n)),
                queries=len(lists),
            )
        )
        per_query_scores[method] = per_query_ndcg(pooled, method, n)
    if per_query_scores:
        result.win_methods, result.win = win_matrix(per_query_scores)
    return result
