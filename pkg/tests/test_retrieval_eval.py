"""Relevance labeling, pooling, IR metrics, win matrix."""

import itertools
import math
import random

import pytest

from quantsearch.corpus import QuantityRecord, SentenceRecord
from quantsearch.errors import MethodQueryMismatch
from quantsearch.extract import RawQuantity, normalize_value
from quantsearch.retrieval_eval import (
    RelevanceList,
    auto_label,
    exist_at_n,
    load_manual_labels,
    map_at_n,
    ndcg_at_n,
    pool_and_filter,
    run_method_suite,
    win_matrix,
)


def qrec(rid, surface, text="desc"):
    return QuantityRecord(
        record_id=rid,
        description_text=text,
        segments=((0, 1),),
        value=normalize_value(surface),
        evidence=text,
        doc_id="d",
        sentence_id=0,
        pivot=(0, 1),
    )


def sentence_with(surfaces):
    tokens = []
    quantities = []
    for s in surfaces:
        start = len(tokens)
        toks = s.split()
        tokens.extend(toks)
        quantities.append(RawQuantity(start, start + len(toks), s))
    return SentenceRecord("d", 0, tuple(tokens), tuple(quantities))


class TestAutoLabel:
    def test_record_mode_value_match(self):
        assert auto_label(qrec("q", "5.0 million"), qrec("r", "5,000,000"))
        assert not auto_label(qrec("q", "5.0 million"), qrec("r", "3,200,000"))

    def test_sentence_mode_any_quantity(self):
        s = sentence_with(["3.2 million", "5.0 million"])
        assert auto_label(qrec("q", "5.0 million"), s, granularity="sentence")

    def test_sentence_mode_advantage_fixture(self):
        # record granularity says no, sentence granularity says yes because a
        # sibling quantity in the same sentence happens to match
        query = qrec("q", "5.0 million")
        result_record = qrec("r", "3.2 million")
        host = sentence_with(["3.2 million", "5.0 million"])
        assert not auto_label(query, result_record, granularity="record")
        assert auto_label(query, host, granularity="sentence")

    def test_bad_granularity(self):
        with pytest.raises(ValueError):
            auto_label(qrec("q", "1"), qrec("r", "1"), granularity="par")


class TestPooling:
    def test_single_method_finds_hit(self):
        pooled = pool_and_filter(
            {
                "m1": {"q1": [("a", 1), ("b", 0)]},
                "m2": {"q1": [("c", 0)]},
            }
        )
        assert pooled.pools == {"q1": {"a"}}

    def test_no_relevant_query_dropped(self):
        pooled = pool_and_filter({"m1": {"q1": [("a", 0)], "q2": [("b", 1)]}})
        assert set(pooled.pools) == {"q2"}
        assert set(pooled.results["m1"]) == {"q2"}

    def test_pool_is_naive_union(self):
        rng = random.Random(0)
        per_method = {}
        for m in ("m1", "m2", "m3"):
            per_method[m] = {
                f"q{i}": [(f"r{rng.randint(0, 9)}", rng.randint(0, 1)) for _ in range(5)]
                for i in range(6)
            }
        pooled = pool_and_filter(per_method)
        for qid, pool in pooled.pools.items():
            naive = set()
            for m in per_method:
                naive |= {rid for rid, label in per_method[m][qid] if label}
            assert pool == naive

    def test_mismatched_query_sets(self):
        with pytest.raises(MethodQueryMismatch):
            pool_and_filter({"m1": {"q1": []}, "m2": {"q2": []}})


def rl(labels, total=None):
    return RelevanceList("q", tuple(labels), total if total is not None else sum(labels))


class TestExist:
    def test_example(self):
        lists = [rl([0, 1, 0])]
        assert exist_at_n(lists, 1) == 0.0
        assert exist_at_n(lists, 3) == 1.0

    def test_all_zero(self):
        assert exist_at_n([rl([0, 0]), rl([0])], 5) == 0.0

    def test_monotone_in_n(self):
        rng = random.Random(1)
        lists = [rl([rng.randint(0, 1) for _ in range(10)], total=10) for _ in range(20)]
        values = [exist_at_n(lists, n) for n in range(1, 11)]
        assert values == sorted(values)


def naive_ap(labels, n):
    labels = list(labels)[:n]
    hits = 0
    precisions = []
    for i, label in enumerate(labels, 1):
        if label:
            hits += 1
            precisions.append(hits / i)
    return sum(precisions) / sum(labels) if sum(labels) else 0.0


def naive_ndcg(labels, total_relevant, n):
    dcg = sum(l / math.log2(i + 1) for i, l in enumerate(list(labels)[:n], 1))
    ideal_n = min(total_relevant, n)
    idcg = sum(1 / math.log2(i + 1) for i in range(1, ideal_n + 1))
    return dcg / idcg if idcg else 0.0


class TestMap:
    def test_hand_computed(self):
        assert map_at_n([rl([1, 0, 1, 0])], 4) == pytest.approx(5 / 6, abs=1e-12)

    def test_all_relevant(self):
        assert map_at_n([rl([1, 1, 1])], 3) == 1.0

    def test_front_loading_maximizes(self):
        for labels in itertools.product([0, 1], repeat=6):
            if not any(labels):
                continue
            best = naive_ap(sorted(labels, reverse=True), 6)
            for perm in itertools.permutations(labels):
                assert naive_ap(perm, 6) <= best + 1e-12
            assert map_at_n([rl(sorted(labels, reverse=True))], 6) == pytest.approx(best)


class TestNdcg:
    def test_second_position(self):
        v = ndcg_at_n([rl([0, 1], total=1)], 2)
        assert v == pytest.approx(1 / math.log2(3), abs=1e-12)

    def test_perfect(self):
        assert ndcg_at_n([rl([1, 1], total=2)], 2) == pytest.approx(1.0, abs=1e-12)

    def test_oracle_equality_random(self):
        rng = random.Random(2)
        for _ in range(300):
            n = rng.randint(1, 20)
            labels = [rng.randint(0, 1) for _ in range(rng.randint(0, 20))]
            total = sum(labels) + rng.randint(0, 3)
            lists = [rl(labels, total=total)]
            assert ndcg_at_n(lists, n) == pytest.approx(
                naive_ndcg(labels, total, n), abs=1e-12
            )
            assert 0.0 <= ndcg_at_n(lists, n) <= 1.0


class TestWinMatrix:
    def test_identical_methods_all_ties(self):
        scores = {"a": {"q1": 0.5, "q2": 0.2}, "b": {"q1": 0.5, "q2": 0.2}}
        methods, matrix = win_matrix(scores)
        assert matrix == [[0.0, 0.0], [0.0, 0.0]]

    def test_three_wins_two_losses(self):
        qa = {f"q{i}": s for i, s in enumerate([1, 1, 1, 0, 0, 0.5, 0.5, 0.5, 0.5, 0.5])}
        qb = {f"q{i}": s for i, s in enumerate([0, 0, 0, 1, 1, 0.5, 0.5, 0.5, 0.5, 0.5])}
        methods, matrix = win_matrix({"a": qa, "b": qb})
        assert matrix[0][1] == pytest.approx(0.3)
        assert matrix[1][0] == pytest.approx(0.2)

    def test_row_column_consistency(self):
        rng = random.Random(3)
        scores = {
            m: {f"q{i}": rng.choice([0.0, 0.25, 0.5, 1.0]) for i in range(30)}
            for m in ("a", "b", "c")
        }
        methods, matrix = win_matrix(scores)
        for i in range(3):
            assert matrix[i][i] == 0.0
            for j in range(3):
                assert matrix[i][j] + matrix[j][i] <= 1.0 + 1e-12


class TestRelevanceListValidation:
    def test_binary_labels_only(self):
        with pytest.raises(ValueError):
            RelevanceList("q", (0, 2), 2)

    def test_pool_big_enough(self):
        with pytest.raises(ValueError):
            RelevanceList("q", (1, 1), 1)


class FakeEngine:
    """Scripted per-method rankings for suite-level tests."""

    def __init__(self, rankings, fail=()):
        self.rankings = rankings
        self.fail = set(fail)

    def search_eval(self, method, query, n):
        if method in self.fail:
            raise RuntimeError("backend down")
        return self.rankings[method][query.record_id][:n]


class TestSuite:
    queries = [qrec("q1", "1"), qrec("q2", "2")]

    def test_single_method_plain_metrics(self):
        engine = FakeEngine({"m": {"q1": [("a", 1), ("b", 0)], "q2": [("c", 1)]}})
        result = run_method_suite(engine, self.queries, ["m"], n=10)
        row = result.rows[0]
        assert row.exist_at_1 == 1.0 and row.queries == 2

    def test_failed_method_reported_suite_continues(self):
        engine = FakeEngine(
            {"ok": {"q1": [("a", 1)], "q2": [("b", 1)]}}, fail={"bad"}
        )
        result = run_method_suite(engine, self.queries, ["ok", "bad"], n=5)
        by_name = {r.method: r for r in result.rows}
        assert by_name["bad"].error is not None
        assert by_name["ok"].exist_at_1 == 1.0

    def test_manual_labels_override(self, tmp_path):
        queries = [qrec(f"q{i}", str(i + 1)) for i in range(5)]
        rankings = {
            "q0": [("a", 1), ("b", 0)],  # auto says rank 1; manual flips to rank 2
            "q1": [("c", 0)],            # auto says nothing; manual marks relevant
            "q2": [("d", 0), ("e", 0)],
            "q3": [("f", 1)],
            "q4": [("g", 0), ("h", 0)],
        }
        engine = FakeEngine({"m": rankings})
        path = tmp_path / "labels.tsv"
        path.write_text(
            "# five hand-labeled queries\n"
            "q0\ta\t0\nq0\tb\t1\n"
            "q1\tc\t1\n"
            "q2\te\t1\n"
            "q3\tf\t1\n"
            "q4\tg\t0\n",
            encoding="utf-8",
        )
        manual = load_manual_labels(path)
        result = run_method_suite(engine, queries, ["m"], n=5, manual_labels=manual)
        row = result.rows[0]
        # q4 has no relevant result and drops in pooling; of the rest,
        # q1 and q3 hit at rank 1, q0 and q2 at rank 2
        assert row.queries == 4
        assert row.exist_at_1 == 0.5
        assert row.exist_at_10 == 1.0

    def test_manual_labels_format_errors(self, tmp_path):
        path = tmp_path / "labels.tsv"
        path.write_text("q1 a 1\n", encoding="utf-8")
        with pytest.raises(ValueError):
            load_manual_labels(path)

    def test_report_formats(self):
        engine = FakeEngine({"m": {"q1": [("a", 1)], "q2": [("b", 1)]}})
        result = run_method_suite(engine, self.queries, ["m"], n=5)
        assert "Exist@1" in result.table()
        assert '"win_matrix"' in result.to_json()
        assert result.win_csv().startswith("method,")
