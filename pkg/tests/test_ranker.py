"""Embedding model, cosine scoring, contrastive training, dense search."""

import numpy as np
import pytest

from quantsearch.corpus import QuantityRecord
from quantsearch.errors import EmptyPairSet, ZeroVector
from quantsearch.extract import normalize_value
from quantsearch.mining import MinedPair
from quantsearch.ranker import (
    ContrastiveConfig,
    DenseIndex,
    HashedEmbeddingModel,
    PrecomputedEmbeddings,
    cosine_score,
    dense_search,
    train_contrastive,
)


class TestCosine:
    def test_identity(self):
        v = np.array([1.0, 2.0, -3.0])
        assert cosine_score(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        assert cosine_score([1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.0, abs=1e-12)

    def test_scale_invariance(self):
        v = np.array([0.3, -0.7, 2.0])
        assert cosine_score(v, 3 * v) == pytest.approx(1.0, abs=1e-12)

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            cosine_score([0.0, 0.0], [1.0, 0.0])

    def test_symmetry_and_scaling_random(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            x = rng.standard_normal(16)
            y = rng.standard_normal(16)
            s = cosine_score(x, y)
            assert abs(s - cosine_score(y, x)) < 1e-9
            assert abs(s - cosine_score(2.5 * x, y)) < 1e-9
            assert abs(s - cosine_score(x, 7.0 * y)) < 1e-9
            assert -1.0 - 1e-12 <= s <= 1.0 + 1e-12


class TestEmbeddingModel:
    def test_equal_strings_equal_vectors(self):
        model = HashedEmbeddingModel(seed=1)
        a = model.encode("total revenue 2020")
        b = model.encode("total revenue 2020")
        assert np.array_equal(a, b)

    def test_deterministic_across_instances(self):
        a = HashedEmbeddingModel(seed=1).encode("net profit")
        b = HashedEmbeddingModel(seed=1).encode("net profit")
        assert np.array_equal(a, b)

    def test_empty_text_is_zero(self):
        model = HashedEmbeddingModel(seed=1)
        assert not model.encode("").any()

    def test_save_load(self, tmp_path):
        model = HashedEmbeddingModel(seed=3, dim=32, n_buckets=1 << 10)
        path = tmp_path / "model.npz"
        model.save(path)
        loaded = HashedEmbeddingModel.load(path)
        assert loaded.dim == 32 and loaded.hash_seed == model.hash_seed
        assert np.array_equal(loaded.weights, model.weights)
        text = "export value of Acme"
        assert np.array_equal(loaded.encode(text), model.encode(text))


def pair(i, j, query=None):
    return MinedPair(min(i, j), max(i, j), 1.0, query or i)


class TestContrastiveTraining:
    texts = {"1": "a b", "2": "b a", "3": "c d"}

    def _train(self, epochs=30, seed=0):
        config = ContrastiveConfig(epochs=epochs, learning_rate=0.2, seed=seed)
        base = HashedEmbeddingModel(seed=0, dim=32, n_buckets=1 << 10)
        return train_contrastive(
            [pair("1", "2")], [pair("1", "3")], self.texts, config, base
        )

    def test_orders_positive_above_negative(self):
        model, trace = self._train()
        pos = cosine_score(model.encode("a b"), model.encode("b a"))
        neg = cosine_score(model.encode("a b"), model.encode("c d"))
        assert pos > neg

    def test_zero_epochs_keeps_initialization(self):
        base = HashedEmbeddingModel(seed=0, dim=32, n_buckets=1 << 10)
        config = ContrastiveConfig(epochs=0, seed=0)
        model, trace = train_contrastive(
            [pair("1", "2")], [pair("1", "3")], self.texts, config, base
        )
        assert np.array_equal(model.weights, base.weights)
        assert trace == []

    def test_loss_decreases(self):
        model, trace = self._train(epochs=20)
        assert trace[-1] <= trace[0]

    def test_deterministic(self):
        m1, t1 = self._train(epochs=5, seed=9)
        m2, t2 = self._train(epochs=5, seed=9)
        assert np.array_equal(m1.weights, m2.weights)
        assert t1 == t2

    def test_needs_both_labels(self):
        with pytest.raises(EmptyPairSet):
            train_contrastive([pair("1", "2")], [], self.texts)

    def test_negative_downsampling_cap(self):
        texts = {str(i): f"w{i} x" for i in range(30)}
        positives = [pair("0", "1")]
        negatives = [MinedPair("0", str(j), 1.0, "0") for j in range(2, 30)]
        config = ContrastiveConfig(epochs=1, max_negatives=5, seed=0)
        base = HashedEmbeddingModel(seed=0, dim=16, n_buckets=1 << 9)
        model, trace = train_contrastive(positives, negatives, texts, config, base)
        assert len(trace) == 1  # ran; per-epoch examples = 1 positive + 5 sampled


def make_records(texts):
    return [
        QuantityRecord(
            record_id=f"r{i:03d}",
            description_text=t,
            segments=((0, 1),),
            value=normalize_value("1"),
            evidence=t,
            doc_id="d",
            sentence_id=0,
            pivot=(0, 1),
        )
        for i, t in enumerate(texts)
    ]


class TestDenseSearch:
    def test_exact_match_ranks_first(self):
        records = make_records(["alpha beta", "gamma delta", "epsilon zeta"])
        model = HashedEmbeddingModel(seed=2, dim=64, n_buckets=1 << 10)
        hits = dense_search("gamma delta", records, model, 3)
        assert hits[0].record_id == "r001"
        assert hits[0].score == pytest.approx(1.0, abs=1e-9)

    def test_k_beyond_corpus(self):
        records = make_records(["a", "b"])
        model = HashedEmbeddingModel(seed=2, dim=16, n_buckets=1 << 8)
        assert len(dense_search("a", records, model, 50)) == 2

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(5)
        vocab = [f"t{i}" for i in range(40)]
        texts = [
            " ".join(rng.choice(vocab, size=rng.integers(1, 8)))
            for _ in range(100)
        ]
        records = make_records(texts)
        model = HashedEmbeddingModel(seed=4, dim=48, n_buckets=1 << 10)
        query = "t1 t2 t3"
        got = dense_search(query, records, model, 10)
        qv = model.encode(query)
        scored = []
        for r in records:
            rv = model.encode(r.description_text)
            scored.append((cosine_score(qv, rv), r.record_id))
        scored.sort(key=lambda p: (-p[0], p[1]))
        assert [h.record_id for h in got] == [rid for _, rid in scored[:10]]
        for hit, (score, _) in zip(got, scored[:10]):
            assert hit.score == pytest.approx(score, abs=1e-9)

    def test_argmax_invariant_under_embedding_rescale(self):
        records = make_records(["one two", "three four", "five six"])
        m1 = HashedEmbeddingModel(seed=6, dim=32, n_buckets=1 << 9)
        m2 = m1.copy()
        m2.weights *= 17.0
        h1 = dense_search("three four", records, m1, 1)
        h2 = dense_search("three four", records, m2, 1)
        assert h1[0].record_id == h2[0].record_id

    def test_zero_query_returns_empty(self):
        records = make_records(["a b"])
        model = HashedEmbeddingModel(seed=1, dim=16, n_buckets=1 << 8)
        assert dense_search("", records, model, 3) == []


class TestPrecomputedEmbeddings:
    def test_file_round_trip(self, tmp_path):
        vectors = {"a": np.array([1.0, 2.0]), "b": np.array([0.25, -1.5])}
        emb = PrecomputedEmbeddings(vectors)
        path = tmp_path / "vectors.tsv"
        emb.save(path)
        loaded = PrecomputedEmbeddings.load(path)
        assert set(loaded.vectors) == {"a", "b"}
        assert np.array_equal(loaded.vectors["a"], vectors["a"])

    def test_search_by_record_id(self):
        records = make_records(["x", "y", "z"])
        vectors = {
            "q": np.array([1.0, 0.0]),
            "r000": np.array([0.9, 0.1]),
            "r001": np.array([0.0, 1.0]),
            "r002": np.array([1.0, 0.05]),
        }
        index = DenseIndex(records, PrecomputedEmbeddings(vectors))
        hits = index.search("q", 2)
        assert [h.record_id for h in hits] == ["r002", "r000"]

    def test_missing_vector_raises(self):
        emb = PrecomputedEmbeddings({"a": np.array([1.0])})
        with pytest.raises(KeyError):
            emb.vector_for("zzz")

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "vectors.tsv"
        path.write_text("a\t1.0,2.0\nbroken line\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":2"):
            PrecomputedEmbeddings.load(path)
