"""Sentence splitting and tokenization.

Two tokenizers live here.  The document tokenizer turns raw sentence text
into the token sequence the extractor and tagger operate on: it keeps
numbers (with their thousands separators, decimal points, attached percent
signs and signs) as single tokens.  The index tokenizer produces lowercase
search terms for BM25 and the hashed embedder, with a character
unigram+bigram fallback for CJK text.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

# sign and separators only count as part of a number when glued to digits
_NUMBER_START = re.compile(r"[+-]?\d")

_DEFAULT_TERMINATORS = "。.!?"


def split_sentences(text: str, terminators: str = _DEFAULT_TERMINATORS) -> list[str]:
    """Split text into sentences on the terminator set.

    A '.' between two digits is a decimal point, not a boundary.
    """
    sentences = []
    start = 0
    for i, ch in enumerate(text):
        if ch not in terminators:
            continue
        if ch == "." and 0 < i < len(text) - 1 and text[i - 1].isdigit() and text[i + 1].isdigit():
            continue
        piece = text[start : i + 1].strip()
        if piece:
            sentences.append(piece)
        start = i + 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _is_cjk(ch: str) -> bool:
    code = ord(ch)
    return (
        0x4E00 <= code <= 0x9FFF
        or 0x3400 <= code <= 0x4DBF
        or 0xF900 <= code <= 0xFAFF
    )


def tokenize_sentence(text: str) -> list[str]:
    """Split a sentence into word, number, and punctuation tokens.

    Number tokens keep an attached sign, thousands separators, a decimal
    point, and a trailing percent sign: "grew -1,234.5% fast" tokenizes to
    ["grew", "-1,234.5%", "fast"].  CJK characters become one token each.
    """
    tokens: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        # number: optional sign glued to a digit, digits with , and . inside
        if ch.isdigit() or (
            ch in "+-" and i + 1 < n and text[i + 1].isdigit()
            and (i == 0 or not text[i - 1].isdigit())
        ):
            j = i + 1 if ch in "+-" else i
            while j < n and text[j].isdigit():
                j += 1
                if j + 1 < n and text[j] in ",." and text[j + 1].isdigit():
                    j += 1
            if j < n and text[j] == "%":
                j += 1
            tokens.append(text[i:j])
            i = j
            continue
        if _is_cjk(ch):
            tokens.append(ch)
            i += 1
            continue
        if ch.isalnum() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_") and not _is_cjk(text[j]):
                j += 1
            tokens.append(text[i:j])
            i = j
            continue
        tokens.append(ch)
        i += 1
    return tokens


@dataclass(frozen=True)
class TokenizerConfig:
    """Settings for the search-term tokenizer; hashed into index caches."""

    lowercase: bool = True
    cjk_ngrams: bool = True

    def fingerprint(self) -> str:
        raw = f"lowercase={self.lowercase};cjk_ngrams={self.cjk_ngrams};v=1"
        return hashlib.sha256(raw.encode("utf-8")).hexdigest()[:16]


_WORD_RE = re.compile(r"\w+", re.UNICODE)


def index_tokenize(text: str, config: TokenizerConfig = TokenizerConfig()) -> list[str]:
    """Produce search terms: lowercase word tokens, CJK unigrams+bigrams."""
    if config.lowercase:
        text = text.lower()
    terms: list[str] = []
    for word in _WORD_RE.findall(text):
        if config.cjk_ngrams and any(_is_cjk(c) for c in word):
            cjk_run = ""
            other_run = ""
            for c in word + "\x00":
                if _is_cjk(c):
                    if other_run:
                        terms.append(other_run)
                        other_run = ""
                    cjk_run += c
                else:
                    if cjk_run:
                        terms.extend(cjk_run)
                        terms.extend(cjk_run[k : k + 2] for k in range(len(cjk_run) - 1))
                        cjk_run = ""
                    if c != "\x00":
                        other_run += c
        else:
            terms.append(word)
    return [t for t in terms if t]
