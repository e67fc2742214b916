"""Pivot marking and BIEO tag sequences.

One quantity is parsed per pass: the sentence gets [START]/[END] marker
tokens around the pivot quantity, a tagger labels every token of the
marked sentence with B/I/E/O, and the decoder turns maximal B, B-E, or
B-I..I-E groups back into description segments indexed over the original
(marker-free) sentence.

Single-token segments are a lone B.  I may only continue a segment opened
by B and must close with E, so the legal tag bigrams are:

    start -> B | O        B -> B | I | E | O      I -> I | E
    O -> B | O            E -> B | O              last tag != I
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IllegalTagTransition, SpanOutOfBounds

START_MARKER = "[START]"
END_MARKER = "[END]"

TAGS = ("B", "I", "E", "O")

# legal successor tags; None keys handle sequence start
NEXT_TAGS = {
    None: {"B", "O"},
    "O": {"B", "O"},
    "B": {"B", "I", "E", "O"},
    "I": {"I", "E"},
    "E": {"B", "O"},
}
FINAL_TAGS = {"B", "E", "O"}

Segment = tuple[int, int]  # half-open token span


@dataclass(frozen=True)
class Description:
    """Ordered, disjoint description segments over original token indices."""

    segments: tuple[Segment, ...]

    def __bool__(self) -> bool:
        return bool(self.segments)

    def render(self, tokens) -> str:
        return " ".join(
            " ".join(tokens[a:b]) for a, b in self.segments
        )


EMPTY_DESCRIPTION = Description(())


@dataclass(frozen=True)
class PivotSentence:
    """A sentence with marker tokens inserted around one pivot quantity.

    tokens includes the markers; pivot_span is the quantity's span in the
    original sentence.  Marked index layout for pivot [a, b):
    positions 0..a-1 original, a = [START], a+1..b pivot tokens,
    b+1 = [END], b+2.. remaining originals shifted by 2.
    """

    tokens: tuple[str, ...]
    pivot_span: tuple[int, int]

    @property
    def start_pos(self) -> int:
        return self.pivot_span[0]

    @property
    def end_pos(self) -> int:
        return self.pivot_span[1] + 1

    def __len__(self) -> int:
        return len(self.tokens)

    def is_marker(self, marked_index: int) -> bool:
        return marked_index in (self.start_pos, self.end_pos)

    def in_pivot(self, marked_index: int) -> bool:
        return self.start_pos < marked_index < self.end_pos

    def to_original(self, marked_index: int) -> int | None:
        """Original index for a marked position; None for the markers."""
        if self.is_marker(marked_index):
            return None
        if marked_index < self.start_pos:
            return marked_index
        if marked_index < self.end_pos:
            return marked_index - 1
        return marked_index - 2

    def to_marked(self, original_index: int) -> int:
        a, b = self.pivot_span
        if original_index < a:
            return original_index
        if original_index < b:
            return original_index + 1
        return original_index + 2

    def original_tokens(self) -> list[str]:
        return [t for i, t in enumerate(self.tokens) if not self.is_marker(i)]


def mark_pivot(tokens, pivot) -> PivotSentence:
    """Insert [START]/[END] markers around the pivot quantity span.

    `pivot` is a RawQuantity or a half-open (start, end) token span.
    """
    span = pivot if isinstance(pivot, tuple) else pivot.span
    a, b = span
    texts = [t if isinstance(t, str) else t.text for t in tokens]
    if not (0 <= a < b <= len(texts)):
        raise SpanOutOfBounds(f"pivot {span} outside sentence of {len(texts)} tokens")
    marked = texts[:a] + [START_MARKER] + texts[a:b] + [END_MARKER] + texts[b:]
    return PivotSentence(tokens=tuple(marked), pivot_span=(a, b))


def encode_segments(segments, length: int) -> list[str]:
    """Inverse of decode: segments (half-open spans) to a BIEO sequence."""
    ordered = sorted(segments)
    tags = ["O"] * length
    prev_end = 0
    for a, b in ordered:
        if not (0 <= a < b <= length):
            raise SpanOutOfBounds(f"segment ({a}, {b}) outside length {length}")
        if a < prev_end:
            raise ValueError(f"overlapping segments at ({a}, {b})")
        prev_end = b
        if b - a == 1:
            tags[a] = "B"
        else:
            tags[a] = "B"
            tags[b - 1] = "E"
            for i in range(a + 1, b - 1):
                tags[i] = "I"
    return tags


def validate_tags(tags) -> None:
    """Raise IllegalTagTransition unless the sequence fits the grammar."""
    prev = None
    for i, tag in enumerate(tags):
        if tag not in TAGS:
            raise IllegalTagTransition(f"unknown tag {tag!r} at position {i}")
        if tag not in NEXT_TAGS[prev]:
            raise IllegalTagTransition(f"illegal transition {prev}->{tag} at position {i}")
        prev = tag
    if prev is not None and prev not in FINAL_TAGS:
        raise IllegalTagTransition(f"sequence ends mid-segment with {prev}")


def _segments_from_tags(tags) -> list[Segment]:
    segments = []
    open_at = None
    for i, tag in enumerate(tags):
        if tag == "B":
            if open_at is not None:
                segments.append((open_at, i))  # previous lone B
            open_at = i
        elif tag == "E":
            segments.append((open_at, i + 1))
            open_at = None
        elif tag == "O":
            if open_at is not None:
                segments.append((open_at, i))
                open_at = None
    if open_at is not None:
        segments.append((open_at, len(tags)))
    return segments


def decode_tags(tags, pivot_sentence: PivotSentence) -> Description:
    """Decode a tag sequence over the marked sentence into a Description.

    Tags on marker tokens and inside the pivot span are forced to O before
    validation, so a tagger can never describe the quantity with itself.
    """
    tags = list(tags)
    if len(tags) != len(pivot_sentence):
        raise ValueError(
            f"{len(tags)} tags for {len(pivot_sentence)} tokens"
        )
    for i in range(len(tags)):
        if pivot_sentence.is_marker(i) or pivot_sentence.in_pivot(i):
            tags[i] = "O"
    validate_tags(tags)
    segments = []
    for a, b in _segments_from_tags(tags):
        # a contiguous marked-space segment cannot cross the pivot block
        # (those positions are O), so the original span is contiguous too
        segments.append((pivot_sentence.to_original(a), pivot_sentence.to_original(b - 1) + 1))
    return Description(tuple(segments))


def encode_description(desc: Description, pivot_sentence: PivotSentence) -> list[str]:
    """Encode original-index segments as tags over the marked sentence."""
    a0, b0 = pivot_sentence.pivot_span
    for a, b in desc.segments:
        if a < b0 and b > a0:
            raise ValueError(f"segment ({a}, {b}) overlaps the pivot span")
    marked = [
        (pivot_sentence.to_marked(a), pivot_sentence.to_marked(b - 1) + 1)
        for a, b in desc.segments
    ]
    return encode_segments(marked, len(pivot_sentence))
