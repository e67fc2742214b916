"""Rule and perceptron taggers."""

import random

import pytest

from quantsearch import bieo, tagger as tg
from quantsearch.errors import EmptyDataset
from quantsearch.extract import extract_quantities
from quantsearch.parse_eval import segment_prf
from quantsearch.tokenize import tokenize_sentence


def parse(sentence, model):
    tokens = tokenize_sentence(sentence)
    out = []
    for q in extract_quantities(tokens):
        ps = bieo.mark_pivot(tokens, q)
        tags = tg.tag(ps, model)
        bieo.validate_tags(tags)
        out.append(bieo.decode_tags(tags, ps).render(tokens))
    return out


class TestRuleTagger:
    def test_noun_window_before_verb(self):
        model = tg.RuleTagger()
        assert parse("The quarterly net revenue reached 5,000,000 dollars .", model) == [
            "quarterly net revenue"
        ]

    def test_year_segment_added(self):
        model = tg.RuleTagger()
        assert parse("In 2019 , total output reached 812 units .", model) == [
            "2019 total output"
        ]

    def test_empty_when_nothing_noun_like(self):
        model = tg.RuleTagger()
        assert parse("7,500 units were sold .", model) == [""]


def toy_examples(n=10, seed=0):
    """Separable fixture: clean statements from fixed templates."""
    rng = random.Random(seed)
    subjects = [["Acme", "Retail"], ["Borealis", "Mining"], ["Cobalt", "Freight"],
                ["Delta", "Farms"], ["Everest", "Labs"]]
    indicators = [["revenue"], ["net", "profit"], ["export", "value"],
                  ["employee", "count"]]
    years = ["2016", "2017", "2018", "2019", "2020", "2021"]
    examples = []
    while len(examples) < n:
        subj = subjects[rng.randrange(len(subjects))]
        ind = indicators[rng.randrange(len(indicators))]
        year = years[rng.randrange(len(years))]
        value = [f"{rng.randint(101, 98765):,}", "units"]
        if rng.random() < 0.5:
            tokens = ["In", year, ",", "the"] + ind + ["of"] + subj + ["reached"] + value + ["."]
            segs = ((1, 2), (4, 4 + len(ind)), (5 + len(ind), 5 + len(ind) + len(subj)))
            pivot = (len(tokens) - 3, len(tokens) - 1)
        else:
            tokens = ["The"] + ind + ["of"] + subj + ["in", year, "was"] + value + ["."]
            i0 = 1
            segs = (
                (i0, i0 + len(ind)),
                (i0 + len(ind) + 1, i0 + len(ind) + 1 + len(subj)),
                (len(tokens) - 5, len(tokens) - 4),
            )
            pivot = (len(tokens) - 3, len(tokens) - 1)
        found = [q.span for q in extract_quantities(tokens)]
        assert found == [pivot]
        examples.append(tg.LabeledExample(tuple(tokens), pivot, segs))
    return examples


def strict_f1(model, examples):
    pairs = []
    for ex in examples:
        ps = bieo.mark_pivot(ex.tokens, ex.pivot)
        pred = bieo.decode_tags(tg.tag(ps, model), ps)
        pairs.append((pred, bieo.Description(tuple(sorted(ex.segments)))))
    return segment_prf(pairs, mode="strict")["f1"]


class TestPerceptron:
    def test_memorizes_small_set(self):
        examples = toy_examples(10, seed=1)
        model, report = tg.train_tagger(examples, epochs=20, seed=0)
        for ex in examples:
            ps = bieo.mark_pivot(ex.tokens, ex.pivot)
            gold = bieo.encode_description(
                bieo.Description(tuple(sorted(ex.segments))), ps
            )
            assert tg.tag(ps, model) == gold

    def test_training_deterministic(self):
        examples = toy_examples(12, seed=2)
        m1, _ = tg.train_tagger(examples, epochs=8, seed=3)
        m2, _ = tg.train_tagger(examples, epochs=8, seed=3)
        assert m1.weights == m2.weights

    def test_training_f1_reaches_one_and_reports(self):
        examples = toy_examples(30, seed=4)
        model, report = tg.train_tagger(examples, epochs=20, seed=0)
        assert report.epochs[-1]["segment_f1"] == 1.0
        assert strict_f1(model, examples) == 1.0

    def test_empty_dataset(self):
        with pytest.raises(EmptyDataset):
            tg.train_tagger([], epochs=1, seed=0)

    def test_output_always_legal(self):
        examples = toy_examples(10, seed=5)
        model, _ = tg.train_tagger(examples, epochs=2, seed=0)
        rng = random.Random(6)
        for _ in range(50):
            n = rng.randint(1, 12)
            tokens = [rng.choice(["alpha", "beta", "2020", "of", "the", "x"]) for _ in range(n)]
            a = rng.randrange(n)
            b = rng.randint(a + 1, n)
            ps = bieo.mark_pivot(tokens, (a, b))
            tags = tg.tag(ps, model)
            bieo.validate_tags(tags)
            assert all(tags[i] == "O" for i in range(len(ps)) if ps.is_marker(i) or ps.in_pivot(i))

    def test_pivot_only_sentence_tags_all_o(self):
        examples = toy_examples(5, seed=7)
        model, _ = tg.train_tagger(examples, epochs=2, seed=0)
        ps = bieo.mark_pivot(["7", "units"], (0, 2))
        assert tg.tag(ps, model) == ["O", "O", "O", "O"]

    def test_save_load_round_trip(self, tmp_path):
        examples = toy_examples(8, seed=8)
        model, _ = tg.train_tagger(examples, epochs=4, seed=0)
        path = tmp_path / "tagger.json"
        model.save(path)
        loaded = tg.PerceptronTagger.load(path)
        assert loaded.weights == model.weights
        assert loaded.template_version == model.template_version
        for ex in examples:
            ps = bieo.mark_pivot(ex.tokens, ex.pivot)
            assert tg.tag(ps, loaded) == tg.tag(ps, model)


class TestLabeledExampleIO:
    def test_jsonl_round_trip(self, tmp_path):
        examples = toy_examples(4, seed=9)
        path = tmp_path / "data.jsonl"
        path.write_text(
            "".join(ex.to_json() + "\n" for ex in examples), encoding="utf-8"
        )
        assert tg.load_examples(path) == examples
