"""Building and persisting the sentence and description corpora.

The sentence corpus keeps every sentence that contains at least one
extracted quantity.  The description corpus holds one record per quantity
whose parsed description is non-empty; quantities with empty descriptions
(non-factual mentions) are counted in the build report and skipped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import bieo, tagger as tagger_mod
from .errors import CorpusFormatError, SchemaVersionMismatch
from .extract import (
    MagnitudeLexicon,
    NormalizedValue,
    RawQuantity,
    extract_quantities,
    normalize_value,
)
from .tokenize import split_sentences, tokenize_sentence

SCHEMA = "quantsearch-corpus"
SCHEMA_VERSION = 1

DEFAULT_EVIDENCE_WINDOW = 30


@dataclass(frozen=True)
class SentenceRecord:
    doc_id: str
    sentence_id: int
    tokens: tuple[str, ...]
    quantities: tuple[RawQuantity, ...]

    @property
    def key(self) -> str:
        return f"{self.doc_id}:{self.sentence_id}"

    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class QuantityRecord:
    record_id: str
    description_text: str
    segments: tuple[bieo.Segment, ...]
    value: NormalizedValue
    evidence: str
    doc_id: str
    sentence_id: int
    pivot: tuple[int, int]


@dataclass
class BuildReport:
    documents: int = 0
    sentences_kept: int = 0
    quantities_seen: int = 0
    empty_descriptions: int = 0
    failures: list = field(default_factory=list)  # (doc_id, message)


@dataclass
class Corpus:
    sentences: list[SentenceRecord] = field(default_factory=list)
    records: list[QuantityRecord] = field(default_factory=list)

    def record_by_id(self, record_id: str) -> QuantityRecord | None:
        if not hasattr(self, "_by_id") or len(self._by_id) != len(self.records):
            self._by_id = {r.record_id: r for r in self.records}
        return self._by_id.get(record_id)

    def sentence_by_key(self, key: str) -> SentenceRecord | None:
        if not hasattr(self, "_by_key") or len(self._by_key) != len(self.sentences):
            self._by_key = {s.key: s for s in self.sentences}
        return self._by_key.get(key)


def make_evidence(tokens, pivot_span: tuple[int, int], window: int) -> str:
    """Token window around the quantity, clipped at the sentence bounds."""
    if window < 0:
        raise ValueError("window must be >= 0")
    a, b = pivot_span
    lo = max(0, a - window)
    hi = min(len(tokens), b + window)
    return " ".join(tokens[lo:hi])


def build_corpus(
    docs,
    tagger,
    lexicon: MagnitudeLexicon | None = None,
    evidence_window: int = DEFAULT_EVIDENCE_WINDOW,
    terminators: str | None = None,
    skip_years: bool = True,
) -> tuple[Corpus, BuildReport]:
    """Run extraction and description parsing over (doc_id, text) pairs.

    A failing document is reported and skipped; the batch continues.
    """
    lexicon = lexicon or MagnitudeLexicon()
    corpus = Corpus()
    report = BuildReport()
    for doc_id, text in docs:
        report.documents += 1
        try:
            _ingest_document(
                corpus, report, doc_id, text, tagger, lexicon,
                evidence_window, terminators, skip_years,
            )
        except Exception as exc:  # per-document isolation
            report.failures.append((doc_id, f"{type(exc).__name__}: {exc}"))
    return corpus, report


def _ingest_document(
    corpus, report, doc_id, text, tagger, lexicon,
    evidence_window, terminators, skip_years,
):
    sentences = (
        split_sentences(text, terminators) if terminators else split_sentences(text)
    )
    for sid, sentence in enumerate(sentences):
        tokens = tokenize_sentence(sentence)
        if not tokens:
            continue
        quantities = extract_quantities(tokens, lexicon, skip_years=skip_years)
        if not quantities:
            continue
        corpus.sentences.append(
            SentenceRecord(doc_id, sid, tuple(tokens), tuple(quantities))
        )
        for qi, quantity in enumerate(quantities):
            report.quantities_seen += 1
            value = normalize_value(quantity.surface, lexicon)
            ps = bieo.mark_pivot(tokens, quantity)
            tags = tagger_mod.tag(ps, tagger)
            desc = bieo.decode_tags(tags, ps)
            if not desc:
                report.empty_descriptions += 1
                continue
            corpus.records.append(
                QuantityRecord(
                    record_id=f"{doc_id}:{sid}:{qi}",  # ':' stays URL-path safe
                    description_text=desc.render(tokens),
                    segments=desc.segments,
                    value=value,
                    evidence=make_evidence(tokens, quantity.span, evidence_window),
                    doc_id=doc_id,
                    sentence_id=sid,
                    pivot=quantity.span,
                )
            )
    report.sentences_kept = len(corpus.sentences)


def _value_to_obj(v: NormalizedValue) -> dict:
    return {
        "m": v.mantissa_digits,
        "e": v.exponent,
        "s": v.sig_digits,
        "kind": v.kind,
        "unit": v.unit_tag,
        "neg": v.negative,
    }


def _value_from_obj(obj: dict) -> NormalizedValue:
    return NormalizedValue(
        mantissa_digits=obj["m"],
        exponent=obj["e"],
        sig_digits=obj["s"],
        kind=obj["kind"],
        unit_tag=obj["unit"],
        negative=obj["neg"],
    )


def save_corpus(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"schema": SCHEMA, "version": SCHEMA_VERSION}) + "\n")
        for s in corpus.sentences:
            fh.write(
                json.dumps(
                    {
                        "type": "sentence",
                        "doc_id": s.doc_id,
                        "sentence_id": s.sentence_id,
                        "tokens": list(s.tokens),
                        "quantities": [[q.start, q.end, q.surface] for q in s.quantities],
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
        for r in corpus.records:
            fh.write(
                json.dumps(
                    {
                        "type": "quantity",
                        "record_id": r.record_id,
                        "description_text": r.description_text,
                        "segments": [list(seg) for seg in r.segments],
                        "value": _value_to_obj(r.value),
                        "evidence": r.evidence,
                        "doc_id": r.doc_id,
                        "sentence_id": r.sentence_id,
                        "pivot": list(r.pivot),
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_corpus(path) -> Corpus:
    corpus = Corpus()
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{path}:1: bad header: {exc}") from exc
        if header.get("schema") != SCHEMA:
            raise SchemaVersionMismatch(f"{path}: not a corpus file")
        if header.get("version") != SCHEMA_VERSION:
            raise SchemaVersionMismatch(
                f"{path}: corpus version {header.get('version')} unsupported"
            )
        for lineno, line in enumerate(fh, 2):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                if obj["type"] == "sentence":
                    corpus.sentences.append(
                        SentenceRecord(
                            doc_id=obj["doc_id"],
                            sentence_id=obj["sentence_id"],
                            tokens=tuple(obj["tokens"]),
                            quantities=tuple(
                                RawQuantity(a, b, surface)
                                for a, b, surface in obj["quantities"]
                            ),
                        )
                    )
                elif obj["type"] == "quantity":
                    corpus.records.append(
                        QuantityRecord(
                            record_id=obj["record_id"],
                            description_text=obj["description_text"],
                            segments=tuple(tuple(s) for s in obj["segments"]),
                            value=_value_from_obj(obj["value"]),
                            evidence=obj["evidence"],
                            doc_id=obj["doc_id"],
                            sentence_id=obj["sentence_id"],
                            pivot=tuple(obj["pivot"]),
                        )
                    )
                else:
                    raise KeyError(f"unknown record type {obj['type']!r}")
            except (KeyError, ValueError, TypeError) as exc:
                raise CorpusFormatError(f"{path}:{lineno}: {exc}") from exc
    return corpus


def load_documents(paths) -> list[tuple[str, str]]:
    """Read plain-text documents, one per file; doc id is the file stem."""
    docs = []
    for p in paths:
        name = str(p).rsplit("/", 1)[-1]
        stem = name.rsplit(".", 1)[0] if "." in name else name
        with open(p, encoding="utf-8") as fh:
            docs.append((stem, fh.read()))
    return docs
