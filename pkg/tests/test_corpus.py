"""Corpus building, evidence snippets, and persistence."""

import pytest

from quantsearch import bieo, tagger as tg
from quantsearch.corpus import (
    build_corpus,
    load_corpus,
    make_evidence,
    save_corpus,
)
from quantsearch.errors import CorpusFormatError, SchemaVersionMismatch
from quantsearch.extract import extract_quantities
from quantsearch.tokenize import tokenize_sentence

DOC1 = (
    "In 2021 , the per capita disposable income in China has grown in both "
    "urban and rural areas , reaching 47,412 yuan and 18,931 yuan respectively ."
)
DOC2 = "The committee met on Tuesday with no outcome ."
DOC3 = "Total exports reached 1.5 million units . Employee numbers were flat ."


@pytest.fixture
def rule_tagger():
    return tg.RuleTagger()


@pytest.fixture
def built(rule_tagger):
    docs = [("doc1", DOC1), ("doc2", DOC2), ("doc3", DOC3)]
    return build_corpus(docs, rule_tagger)


class TestBuild:
    def test_two_records_from_income_sentence(self, built):
        corpus, report = built
        doc1_records = [r for r in corpus.records if r.doc_id == "doc1"]
        assert len(doc1_records) == 2
        surfaces = {r.value.render() for r in doc1_records}
        assert surfaces == {"47412 yuan", "18931 yuan"}

    def test_no_digit_document_contributes_nothing(self, built):
        corpus, _ = built
        assert not any(r.doc_id == "doc2" for r in corpus.records)
        assert not any(s.doc_id == "doc2" for s in corpus.sentences)

    def test_record_count_matches_manual_pipeline(self, rule_tagger):
        docs = [("doc1", DOC1), ("doc2", DOC2), ("doc3", DOC3)]
        expected = 0
        from quantsearch.tokenize import split_sentences

        for _, text in docs:
            for sentence in split_sentences(text):
                tokens = tokenize_sentence(sentence)
                for q in extract_quantities(tokens):
                    ps = bieo.mark_pivot(tokens, q)
                    desc = bieo.decode_tags(tg.tag(ps, rule_tagger), ps)
                    if desc:
                        expected += 1
        corpus, _ = build_corpus(docs, rule_tagger)
        assert len(corpus.records) == expected

    def test_empty_descriptions_counted_not_stored(self, rule_tagger):
        corpus, report = build_corpus([("d", "7,500 units were sold .")], rule_tagger)
        assert report.quantities_seen == 1
        assert report.empty_descriptions == 1
        assert corpus.records == []
        assert len(corpus.sentences) == 1  # sentence still has a quantity

    def test_description_text_retokenizes_to_segments(self, built):
        corpus, _ = built
        for r in corpus.records:
            sentence = corpus.sentence_by_key(f"{r.doc_id}:{r.sentence_id}")
            segment_tokens = []
            for a, b in r.segments:
                segment_tokens.extend(sentence.tokens[a:b])
            assert tokenize_sentence(r.description_text) == segment_tokens

    def test_evidence_contains_surface(self, built):
        corpus, _ = built
        for r in corpus.records:
            sentence = corpus.sentence_by_key(f"{r.doc_id}:{r.sentence_id}")
            surface = " ".join(sentence.tokens[r.pivot[0] : r.pivot[1]])
            assert surface in r.evidence

    def test_failures_do_not_abort_batch(self):
        class Exploding:
            def tag(self, ps):
                raise RuntimeError("boom")

        corpus, report = build_corpus(
            [("bad", DOC1), ("empty", DOC2)], Exploding()
        )
        assert [d for d, _ in report.failures] == ["bad"]
        assert report.documents == 2


class TestEvidence:
    def test_window_zero_is_surface(self):
        tokens = ["a", "b", "5,000", "yuan", "c"]
        assert make_evidence(tokens, (2, 4), 0) == "5,000 yuan"

    def test_window_covers_sentence(self):
        tokens = ["a", "b", "5", "c"]
        assert make_evidence(tokens, (2, 3), 99) == "a b 5 c"

    def test_window_arithmetic(self):
        tokens = [f"t{i}" for i in range(20)]
        assert make_evidence(tokens, (10, 12), 3) == " ".join(tokens[7:15])

    def test_negative_window_rejected(self):
        with pytest.raises(ValueError):
            make_evidence(["a"], (0, 1), -1)


class TestPersistence:
    def test_round_trip(self, built, tmp_path):
        corpus, _ = built
        path = tmp_path / "corpus.jsonl"
        save_corpus(corpus, path)
        assert load_corpus(path) == corpus

    def test_empty_round_trip(self, tmp_path):
        from quantsearch.corpus import Corpus

        path = tmp_path / "empty.jsonl"
        save_corpus(Corpus(), path)
        assert load_corpus(path) == Corpus()

    def test_corrupted_line_names_line_number(self, built, tmp_path):
        corpus, _ = built
        path = tmp_path / "corpus.jsonl"
        save_corpus(corpus, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        lines[2] = '{"type": "sentence", "doc_id": 1}'
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError, match=":3:"):
            load_corpus(path)

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"schema": "quantsearch-corpus", "version": 99}\n')
        with pytest.raises(SchemaVersionMismatch):
            load_corpus(path)

    def test_foreign_file_rejected(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"something": "else"}\n')
        with pytest.raises(SchemaVersionMismatch):
            load_corpus(path)
