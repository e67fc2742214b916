"""Deterministic synthetic document generator.

Plants facts (subject, indicator, year -> value) that are each stated in
two documents using different indicator synonyms and different numeric
surface forms, so value-coincidence mining has real paraphrases to find.
Pollution comes from two directions: growth-rate distractor sentences that
reuse a fact's terms around a percentage value, and comparison sentences
that mention another subject's indicator inside a true statement.  Ground
truth fact groups are emitted alongside the documents so relevance can be
checked without value matching.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field

from .extract import MagnitudeLexicon, NormalizedValue, extract_quantities, same_value
from .tagger import LabeledExample

_SUBJECT_HEADS = [
    "Hengtai", "Ruifeng", "Jinyuan", "Baosteel", "Huaxin", "Zhongke",
    "Lianchuang", "Yongda", "Shengshi", "Tianhe", "Guangyun", "Minsheng",
    "Kaiyuan", "Xinghai", "Changjiang", "Ningbo", "Weifang", "Qingshan",
    "Dongfang", "Wanli", "Sunrise", "Northgate", "Ironbridge", "Silverlake",
]
_SUBJECT_TAILS = [
    "Industrial", "Holdings", "Materials", "Electronics", "Textile",
    "Machinery", "Pharma", "Energy", "Logistics", "Chemicals", "Foods",
    "Optics",
]

# within a group the synonyms share no tokens, so a bag-of-words ranker
# cannot bridge them without training
_INDICATOR_GROUPS = [
    (["revenue"], ["operating", "income"], "yuan"),
    (["net", "profit"], ["after", "tax", "earnings"], "yuan"),
    (["market", "size"], ["sales", "volume"], "yuan"),
    (["employee", "count"], ["workforce", "headcount"], "people"),
    (["research", "spending"], ["development", "expenditure"], "yuan"),
    (["total", "assets"], ["balance", "holdings"], "yuan"),
    (["export", "value"], ["overseas", "shipments"], "yuan"),
    (["production", "output"], ["manufacturing", "volume"], "units"),
]

_YEARS = [str(y) for y in range(2015, 2024)]

_KIND_BY_UNIT = {"yuan": "currency", "people": "count", "units": "count"}


@dataclass
class SyntheticSpec:
    n_facts: int = 500
    distractor_rate: float = 0.45  # fraction of all sentences
    sig_digits: tuple[int, int] = (3, 5)
    n_docs: int = 60
    multi_rate: float = 0.1  # chance a statement merges into a 2-fact sentence
    comparison_rate: float = 0.65  # chance a statement name-drops another subject
    same_group_comparison: float = 0.85  # comparison reuses the fact's indicator
    same_wording_rate: float = 0.55  # facts restated with the same synonym
    distractor_syn0_bias: float = 0.75  # distractors lean on the first synonym
    seed: int = 0


@dataclass
class Fact:
    fact_id: int
    subject: list[str]
    group: int
    year: str
    value: NormalizedValue
    surfaces: list[str] = field(default_factory=list)
    docs: list[str] = field(default_factory=list)


@dataclass
class _Sentence:
    tokens: list[str]
    # one entry per quantity, in token order: (pivot span, gold segments)
    quantities: list[tuple[tuple[int, int], tuple[tuple[int, int], ...]]]
    fact_ids: list[int]  # facts stated here (empty for distractors)


@dataclass
class SyntheticCorpus:
    docs: list[tuple[str, str]]
    labels: list[tuple[str, LabeledExample]]  # (doc_id, example)
    facts: list[Fact]

    def facts_json(self) -> str:
        return json.dumps(
            {
                "facts": [
                    {
                        "fact_id": f.fact_id,
                        "subject": " ".join(f.subject),
                        "group": f.group,
                        "year": f.year,
                        "surfaces": f.surfaces,
                        "docs": f.docs,
                    }
                    for f in self.facts
                ]
            },
            indent=1,
        )


class _Builder:
    """Accumulates tokens while recording segment spans per quantity slot."""

    def __init__(self):
        self.tokens: list[str] = []
        self.slots: list[tuple[tuple[int, int] | None, list[tuple[int, int]]]] = []

    def slot(self):
        self.slots.append((None, []))
        return len(self.slots) - 1

    def add(self, tokens, role=None, slot=None):
        a = len(self.tokens)
        self.tokens.extend(tokens)
        b = len(self.tokens)
        if role == "pivot":
            pivot, segs = self.slots[slot]
            self.slots[slot] = ((a, b), segs)
        elif role == "seg":
            self.slots[slot][1].append((a, b))
        return self

    def finish(self, fact_ids) -> _Sentence:
        quantities = []
        for pivot, segs in self.slots:
            quantities.append((pivot, tuple(sorted(segs))))
        quantities.sort(key=lambda q: q[0])
        return _Sentence(tokens=self.tokens, quantities=quantities, fact_ids=fact_ids)


def _sample_value(rng, sig_range, unit) -> NormalizedValue:
    sig = rng.randint(*sig_range)
    digits = [str(rng.randint(1, 9))]
    digits += [str(rng.randint(0, 9)) for _ in range(sig - 2)]
    if sig > 1:
        digits.append(str(rng.randint(1, 9)))  # nonzero tail keeps renders stable
    return NormalizedValue(
        mantissa_digits="".join(digits),
        exponent=rng.randint(2, 6),
        sig_digits=sig,
        kind=_KIND_BY_UNIT[unit],
        unit_tag=unit,
    )


def _plain_surface(value: NormalizedValue) -> list[str]:
    n = int(value.mantissa_digits) * 10 ** value.exponent
    return [f"{n:,}", value.unit_tag]


def _magnitude_surface(value: NormalizedValue) -> list[str] | None:
    m, e = value.mantissa_digits, value.exponent
    total = len(m) + e
    for word, p in (("billion", 9), ("million", 6), ("thousand", 3)):
        if total <= p:
            continue
        shift = e - p
        if shift >= 0:
            coeff = m + "0" * shift
        else:
            point = len(m) + shift
            if point <= 0:
                continue
            coeff = m[:point] + "." + m[point:]
        return [coeff, word, value.unit_tag]
    return None


def _percent_surface(rng, used: set[str]) -> str:
    for _ in range(64):  # unique keeps growth queries out of the pools
        digits = rng.randint(11, 99) * 100 + rng.randint(1, 99)
        surface = f"{digits // 100}.{digits % 100:02d}%"
        if surface not in used:
            used.add(surface)
            return surface
    return surface


def _add_statement(sb: _Builder, rng, fact: Fact, syn, val_tokens, slot) -> None:
    template = rng.randrange(3)
    if template == 0:
        sb.add(["In"]).add([fact.year], "seg", slot).add([",", "the"])
        sb.add(syn, "seg", slot).add(["of"]).add(fact.subject, "seg", slot)
        sb.add(["reached"]).add(val_tokens, "pivot", slot).add(["."])
    elif template == 1:
        sb.add(["The"]).add(syn, "seg", slot).add(["of"]).add(fact.subject, "seg", slot)
        sb.add(["in"]).add([fact.year], "seg", slot).add(["was"])
        sb.add(val_tokens, "pivot", slot).add(["."])
    else:
        sb.add(fact.subject, "seg", slot).add(["reported"]).add(syn, "seg", slot)
        sb.add(["of"]).add(val_tokens, "pivot", slot).add(["in"])
        sb.add([fact.year], "seg", slot).add(["."])


def _statement(rng, fact, syn, val_tokens, compare_with=None) -> _Sentence:
    sb = _Builder()
    slot = sb.slot()
    if compare_with is not None:
        osubj, osyn = compare_with
        sb.add(["Compared", "with", "the"]).add(osyn).add(["of"]).add(osubj).add([","])
        sb.add(["the"]).add(syn, "seg", slot).add(["of"]).add(fact.subject, "seg", slot)
        sb.add(["in"]).add([fact.year], "seg", slot).add(["reached"])
        sb.add(val_tokens, "pivot", slot).add(["."])
    else:
        _add_statement(sb, rng, fact, syn, val_tokens, slot)
    return sb.finish([fact.fact_id])


def _merged_statement(rng, fa, syna, vala, fb, synb, valb) -> _Sentence:
    sb = _Builder()
    sa, sbslot = sb.slot(), sb.slot()
    sb.add(["In"]).add([fa.year], "seg", sa).add([",", "the"])
    sb.add(syna, "seg", sa).add(["of"]).add(fa.subject, "seg", sa)
    sb.add(["reached"]).add(vala, "pivot", sa).add(["and", "the"])
    sb.add(synb, "seg", sbslot).add(["of"]).add(fb.subject, "seg", sbslot)
    sb.add(["in"]).add([fb.year], "seg", sbslot).add(["was"])
    sb.add(valb, "pivot", sbslot).add(["."])
    return sb.finish([fa.fact_id, fb.fact_id])


def _distractor(rng, fact: Fact, syn, pct: str) -> _Sentence:
    sb = _Builder()
    slot = sb.slot()
    if rng.random() < 0.5:
        sb.add(["In"]).add([fact.year], "seg", slot).add([",", "the"])
        sb.add(syn + ["growth", "rate"], "seg", slot).add(["of"])
        sb.add(fact.subject, "seg", slot)
        sb.add(["increased", "by"]).add([pct], "pivot", slot).add(["."])
    else:
        sb.add(["The"]).add(syn + ["growth", "rate"], "seg", slot)
        sb.add(["of"]).add(fact.subject, "seg", slot).add(["in"])
        sb.add([fact.year], "seg", slot).add(["was"]).add([pct], "pivot", slot).add(["."])
    return sb.finish([])


def generate(spec: SyntheticSpec) -> SyntheticCorpus:
    """Build documents, gold labels, and the fact table for one seed."""
    rng = random.Random(spec.seed)
    lexicon = MagnitudeLexicon()

    subjects = [[h, t] for h in _SUBJECT_HEADS for t in _SUBJECT_TAILS]
    rng.shuffle(subjects)

    facts: list[Fact] = []
    used_keys = set()
    fact_values: list[NormalizedValue] = []
    while len(facts) < spec.n_facts:
        subject = subjects[rng.randrange(len(subjects))]
        group = rng.randrange(len(_INDICATOR_GROUPS))
        year = _YEARS[rng.randrange(len(_YEARS))]
        key = (tuple(subject), group, year)
        if key in used_keys:
            continue
        used_keys.add(key)
        unit = _INDICATOR_GROUPS[group][2]
        value = _sample_value(rng, spec.sig_digits, unit)
        if any(same_value(value, v) for v in fact_values):
            continue
        fact_values.append(value)
        facts.append(Fact(len(facts), subject, group, year, value))

    sentences: list[_Sentence] = []
    merge_queue: list[tuple[Fact, list[str], list[str]]] = []
    for fact in facts:
        syn0, syn1, _unit = _INDICATOR_GROUPS[fact.group]
        if rng.random() < spec.same_wording_rate:
            syn1 = syn0  # restated verbatim, only template and surface vary
        val0 = _plain_surface(fact.value)
        val1 = _magnitude_surface(fact.value) or val0
        if rng.random() < 0.5:
            val0, val1 = val1, val0
        fact.surfaces = [" ".join(val0), " ".join(val1)]
        for phrasing, (syn, val_tokens) in enumerate(((syn0, val0), (syn1, val1))):
            if phrasing == 0 and rng.random() < spec.multi_rate:
                merge_queue.append((fact, syn, val_tokens))
                continue
            compare_with = None
            if rng.random() < spec.comparison_rate:
                other = facts[rng.randrange(len(facts))]
                if other.subject != fact.subject:
                    if rng.random() < spec.same_group_comparison:
                        og = _INDICATOR_GROUPS[fact.group]
                    else:
                        og = _INDICATOR_GROUPS[other.group]
                    compare_with = (other.subject, og[rng.randrange(2)])
            sentences.append(_statement(rng, fact, syn, val_tokens, compare_with))
    while len(merge_queue) >= 2:
        (fa, syna, vala) = merge_queue.pop()
        (fb, synb, valb) = merge_queue.pop()
        sentences.append(_merged_statement(rng, fa, syna, vala, fb, synb, valb))
    for fact, syn, val_tokens in merge_queue:  # odd leftover
        sentences.append(_statement(rng, fact, syn, val_tokens))

    n_statements = len(sentences)
    n_distractors = int(spec.distractor_rate / (1 - spec.distractor_rate) * n_statements)
    used_pcts: set[str] = set()
    for _ in range(n_distractors):
        fact = facts[rng.randrange(len(facts))]
        pick = 0 if rng.random() < spec.distractor_syn0_bias else 1
        syn = _INDICATOR_GROUPS[fact.group][pick]
        sentences.append(_distractor(rng, fact, syn, _percent_surface(rng, used_pcts)))

    rng.shuffle(sentences)
    doc_ids = [f"doc{d:04d}" for d in range(spec.n_docs)]
    doc_sentences: dict[str, list[_Sentence]] = {d: [] for d in doc_ids}
    fact_docs: dict[int, set[str]] = {}
    for sentence in sentences:
        if not sentence.fact_ids:
            doc = doc_ids[rng.randrange(len(doc_ids))]
        else:
            taken = set()
            for fid in sentence.fact_ids:
                taken |= fact_docs.setdefault(fid, set())
            choices = [d for d in doc_ids if d not in taken] or doc_ids
            doc = choices[rng.randrange(len(choices))]
            for fid in sentence.fact_ids:
                fact_docs[fid].add(doc)
                facts[fid].docs.append(doc)
        doc_sentences[doc].append(sentence)

    docs = []
    labels = []
    for doc_id in doc_ids:
        parts = []
        for sentence in doc_sentences[doc_id]:
            parts.append(" ".join(sentence.tokens))
            found = [q.span for q in extract_quantities(sentence.tokens, lexicon)]
            planted = [pivot for pivot, _ in sentence.quantities]
            if found != planted:  # template must agree with the extractor
                raise AssertionError(
                    f"extractor found {found}, template planted {planted}"
                )
            for pivot, segments in sentence.quantities:
                labels.append(
                    (
                        doc_id,
                        LabeledExample(
                            tokens=tuple(sentence.tokens),
                            pivot=pivot,
                            segments=segments,
                        ),
                    )
                )
        docs.append((doc_id, " ".join(parts)))
    return SyntheticCorpus(docs=docs, labels=labels, facts=facts)


def write_corpus(corpus: SyntheticCorpus, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    doc_dir = os.path.join(out_dir, "docs")
    os.makedirs(doc_dir, exist_ok=True)
    for doc_id, text in corpus.docs:
        with open(os.path.join(doc_dir, f"{doc_id}.txt"), "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    with open(os.path.join(out_dir, "labels.jsonl"), "w", encoding="utf-8") as fh:
        for doc_id, example in corpus.labels:
            obj = json.loads(example.to_json())
            obj["doc_id"] = doc_id
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
    with open(os.path.join(out_dir, "facts.json"), "w", encoding="utf-8") as fh:
        fh.write(corpus.facts_json() + "\n")
