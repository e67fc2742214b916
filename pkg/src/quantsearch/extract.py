"""Rule-based quantity extraction and value normalization.

A quantity mention is a number token plus optional magnitude word
("million") and optional unit word ("yuan", "units") or percent sign.
Normalization turns the surface form into a canonical
(mantissa, exponent, significant digits) triple so that two mentions can be
compared for value coincidence: "1.23 million" and "1,230,000" both
canonicalize to 123 x 10^4 with 3 significant digits.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import MalformedSurface

DEFAULT_MAGNITUDES: dict[str, int] = {
    "thousand": 3,
    "million": 6,
    "billion": 9,
    "trillion": 12,
    "万": 4,   # 万
    "亿": 8,   # 亿
}

CURRENCY_WORDS = {
    "yuan", "rmb", "usd", "dollar", "dollars", "euro", "euros", "yen",
    "元", "$",
}
COUNT_WORDS = {
    "unit", "units", "people", "persons", "shares", "vehicles", "cars",
    "employees", "tons", "tonnes", "enterprises", "companies",
}
PERCENT_WORDS = {"%", "percent"}

# bare 4-digit tokens in this range read as years, not measured values
_YEAR_RE = re.compile(r"(1[5-9]|2[01])\d{2}")

# number token: optional sign, digits with optional grouping and decimal
# point, optional attached percent sign; e-notation only appears in
# canonical renderings, never in extracted text
_NUMBER_RE = re.compile(r"[+-]?(\d{1,3}(?:,\d{3})+|\d+)(\.\d+)?%?")


class MagnitudeLexicon:
    """Case-insensitive map from magnitude word to power of ten."""

    def __init__(self, entries: dict[str, int] | None = None):
        entries = DEFAULT_MAGNITUDES if entries is None else entries
        self._powers = {}
        for word, power in entries.items():
            power = int(power)
            if power < 0:
                raise ValueError(f"magnitude power must be >= 0: {word!r}")
            self._powers[word.lower()] = power

    def get(self, word: str) -> int | None:
        return self._powers.get(word.lower())

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._powers

    def __eq__(self, other) -> bool:
        return isinstance(other, MagnitudeLexicon) and self._powers == other._powers

    @classmethod
    def from_file(cls, path) -> "MagnitudeLexicon":
        """Load "word<TAB>power" lines; blank lines and #-comments skipped."""
        entries = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 'word<TAB>power'")
                entries[parts[0]] = int(parts[1])
        return cls(entries)


@dataclass(frozen=True)
class RawQuantity:
    """A quantity mention: half-open token span plus its verbatim surface."""

    start: int
    end: int
    surface: str

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class NormalizedValue:
    """Canonical numeric value: sign * mantissa_digits * 10^exponent.

    mantissa_digits keeps exactly the significant digits of the written
    form: trailing zeros after a decimal point are significant, trailing
    zeros of a plain integer and zeros implied by a magnitude word are not.
    sig_digits always equals len(mantissa_digits).
    """

    mantissa_digits: str
    exponent: int
    sig_digits: int
    kind: str = "other"  # count | currency | percentage | other
    unit_tag: str | None = None
    negative: bool = False

    def is_zero(self) -> bool:
        return self.mantissa_digits == "0"

    def to_float(self) -> float:
        v = int(self.mantissa_digits) * (10.0 ** self.exponent)
        return -v if self.negative else v

    def render(self) -> str:
        """Render a surface that normalizes back to this exact value."""
        digits = self._render_digits()
        if self.negative:
            digits = "-" + digits
        if self.kind == "percentage":
            return digits + "%"
        if self.unit_tag:
            return f"{digits} {self.unit_tag}"
        return digits

    def _render_digits(self) -> str:
        m, e = self.mantissa_digits, self.exponent
        if m == "0":
            return "0"
        if e >= 0:
            if not m.endswith("0"):
                return m + "0" * e
            # plain integer form would drop significant trailing zeros
            rest = m[1:]
            exp10 = e + len(m) - 1
            return (f"{m[0]}.{rest}" if rest else m[0]) + f"e{exp10}"
        point = len(m) + e
        if point <= 0:
            return "0." + "0" * (-point) + m
        return m[:point] + "." + m[point:]


def _shift_zeros(digits: str, exponent: int) -> tuple[str, int]:
    """Strip trailing zeros, moving them into the exponent."""
    stripped = digits.rstrip("0")
    return stripped, exponent + (len(digits) - len(stripped))


def numeric_key(value: NormalizedValue) -> tuple[bool, str, int]:
    """Precision-free identity of the number: equal keys <=> equal value."""
    if value.is_zero():
        return (False, "0", 0)
    m, e = _shift_zeros(value.mantissa_digits, value.exponent)
    return (value.negative, m, e)


def _classify_unit(word: str) -> tuple[str, str] | None:
    low = word.lower()
    if low in PERCENT_WORDS:
        return "percentage", "%"
    if low in CURRENCY_WORDS:
        return "currency", low
    if low in COUNT_WORDS:
        return "count", low
    return None


def normalize_value(
    surface: str, lexicon: MagnitudeLexicon | None = None
) -> NormalizedValue:
    """Parse an extracted surface into its canonical NormalizedValue.

    Raises MalformedSurface when the surface does not fit the grammar.
    """
    lexicon = lexicon or MagnitudeLexicon()
    parts = surface.split()
    if not parts:
        raise MalformedSurface(f"empty surface: {surface!r}")

    number = parts[0]
    percent = False
    if number.endswith("%"):
        percent = True
        number = number[:-1]
    match = re.fullmatch(
        r"([+-]?)(\d{1,3}(?:,\d{3})+|\d+)(?:\.(\d+))?(?:[eE]([+-]?\d+))?", number
    )
    if match is None:
        raise MalformedSurface(f"not a number: {surface!r}")
    sign, int_part, frac_part, e_part = match.groups()
    int_part = int_part.replace(",", "")
    frac_part = frac_part or ""

    digits = int_part + frac_part
    exponent = -len(frac_part) + (int(e_part) if e_part else 0)

    kind = "other"
    unit_tag = None
    magnitude_seen = False
    for word in parts[1:]:
        power = lexicon.get(word)
        if power is not None and not magnitude_seen and kind == "other" and unit_tag is None:
            exponent += power
            magnitude_seen = True
            continue
        unit = _classify_unit(word)
        if unit is not None and unit_tag is None:
            kind, unit_tag = unit
            continue
        raise MalformedSurface(f"unexpected word {word!r} in {surface!r}")
    if percent:
        if unit_tag is not None:
            raise MalformedSurface(f"percent sign and unit word in {surface!r}")
        kind, unit_tag = "percentage", "%"

    # canonical form: drop leading zeros; drop trailing zeros unless they
    # are written after the decimal point (those are significant)
    stripped = digits.lstrip("0")
    if not stripped:
        return NormalizedValue("0", 0, 1, kind=kind, unit_tag=unit_tag)
    if not frac_part:
        stripped, exponent = _shift_zeros(stripped, exponent)
    return NormalizedValue(
        mantissa_digits=stripped,
        exponent=exponent,
        sig_digits=len(stripped),
        kind=kind,
        unit_tag=unit_tag,
        negative=sign == "-",
    )


def round_to_sig_digits(value: NormalizedValue, sig: int) -> NormalizedValue:
    """Round half-away-from-zero to `sig` significant digits."""
    m = value.mantissa_digits
    if sig <= 0:
        raise ValueError("sig must be positive")
    if value.is_zero() or len(m) <= sig:
        return value
    keep, rest = m[:sig], m[sig:]
    exponent = value.exponent + len(rest)
    if rest[0] >= "5":
        rounded = str(int(keep) + 1)
        if len(rounded) > sig:  # 99 -> 100: carry adds a digit
            rounded, exponent = _shift_zeros(rounded, exponent)
        keep = rounded
    return NormalizedValue(
        mantissa_digits=keep,
        exponent=exponent,
        sig_digits=len(keep),
        kind=value.kind,
        unit_tag=value.unit_tag,
        negative=value.negative,
    )


def same_value(a: NormalizedValue, b: NormalizedValue) -> bool:
    """Value-coincidence rule.

    Kinds must be compatible (a percentage only ever matches a
    percentage).  The value written with more significant digits is
    rounded, half-away-from-zero, to the other's precision; the two are
    the same iff their rounded canonical forms coincide.
    """
    if (a.kind == "percentage") != (b.kind == "percentage"):
        return False
    if a.is_zero() and b.is_zero():
        return True
    if a.sig_digits > b.sig_digits:
        a = round_to_sig_digits(a, b.sig_digits)
    elif b.sig_digits > a.sig_digits:
        b = round_to_sig_digits(b, a.sig_digits)
    return numeric_key(a) == numeric_key(b)


def extract_quantities(
    tokens, lexicon: MagnitudeLexicon | None = None, skip_years: bool = True
) -> list[RawQuantity]:
    """Find all maximal quantity spans in a tokenized sentence.

    Returns non-overlapping spans sorted by start index.  A span is a
    number token, at most one following magnitude word, and at most one
    following unit word or percent sign.  Bare tokens that read as years
    (e.g. "2021" with no unit) are skipped unless skip_years is False.
    """
    lexicon = lexicon or MagnitudeLexicon()
    texts = [t if isinstance(t, str) else t.text for t in tokens]
    found: list[RawQuantity] = []
    i = 0
    n = len(texts)
    while i < n:
        tok = texts[i]
        if _NUMBER_RE.fullmatch(tok) is None:
            i += 1
            continue
        j = i + 1
        if j < n and texts[j] in lexicon:
            j += 1
        if j < n and (_classify_unit(texts[j]) is not None):
            j += 1
        if (
            skip_years
            and j == i + 1
            and _YEAR_RE.fullmatch(tok) is not None
        ):
            i = j
            continue
        found.append(RawQuantity(i, j, " ".join(texts[i:j])))
        i = j
    return found
