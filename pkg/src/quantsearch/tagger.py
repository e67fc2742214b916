"""Description taggers over pivot-marked sentences.

The tagger interface is a single method, tag(pivot_sentence) -> BIEO tags,
so neural encoders can be plugged in later.  Two implementations ship:

* RuleTagger: the nearest noun-like token window left of the pivot plus
  any leading 4-digit year token.  No training, useful as a floor.
* PerceptronTagger: averaged structured perceptron with hand-built
  features and constrained Viterbi decoding, so its output always obeys
  the BIEO grammar and never tags markers or pivot tokens.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field

from . import bieo
from .bieo import PivotSentence
from .errors import EmptyDataset

FEATURE_TEMPLATE_VERSION = "v1"

_YEAR_TOKEN = re.compile(r"(1[5-9]|2[01])\d{2}")

STOPWORDS = {
    "the", "a", "an", "of", "in", "on", "at", "to", "for", "and", "or",
    "was", "were", "is", "are", "be", "been", "being", "has", "have",
    "had", "by", "with", "from", "as", "its", "their", "it", "this",
    "that", "both", "reached", "reaching", "grew", "grown", "rose",
    "respectively", "about", "than", "compared",
}


@dataclass(frozen=True)
class LabeledExample:
    """One (sentence, pivot quantity, gold description) training row."""

    tokens: tuple[str, ...]
    pivot: tuple[int, int]
    segments: tuple[bieo.Segment, ...]

    @classmethod
    def from_json(cls, line: str) -> "LabeledExample":
        obj = json.loads(line)
        return cls(
            tokens=tuple(obj["tokens"]),
            pivot=tuple(obj["pivot"]),
            segments=tuple(tuple(s) for s in obj["segments"]),
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "tokens": list(self.tokens),
                "pivot": list(self.pivot),
                "segments": [list(s) for s in self.segments],
            },
            ensure_ascii=False,
        )


def load_examples(path) -> list[LabeledExample]:
    examples = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                examples.append(LabeledExample.from_json(line))
    return examples


def _is_nounlike(token: str) -> bool:
    if not token or not any(ch.isalpha() for ch in token):
        return False
    return token.lower() not in STOPWORDS


class RuleTagger:
    """Left noun window + leading year heuristic."""

    def tag(self, ps: PivotSentence) -> list[str]:
        original = ps.original_tokens()
        a, b = ps.pivot_span
        segments: list[bieo.Segment] = []

        end = a
        while end > 0 and not _is_nounlike(original[end - 1]):
            end -= 1
        start = end
        while start > 0 and _is_nounlike(original[start - 1]):
            start -= 1
        if start < end:
            segments.append((start, end))

        for i, tok in enumerate(original):
            if a <= i < b or (start <= i < end):
                continue
            if _YEAR_TOKEN.fullmatch(tok):
                segments.append((i, i + 1))
                break

        return bieo.encode_description(
            bieo.Description(tuple(sorted(segments))), ps
        )


def _shape(token: str) -> str:
    out = []
    last = ""
    for ch in token:
        if ch.isdigit():
            cls = "d"
        elif ch.isalpha():
            cls = "X" if ch.isupper() else "x"
        else:
            cls = ch
        if cls != last:
            out.append(cls)
            last = cls
    return "".join(out)


def _position_features(ps: PivotSentence, i: int) -> list[str]:
    """Feature strings for marked position i; previous tag is handled by
    the transition weights, not repeated here."""
    tokens = ps.tokens
    tok = tokens[i]
    low = tok.lower()
    feats = [
        f"w0={tok}",
        f"lw0={low}",
        f"shape={_shape(tok)}",
    ]
    if tok.isdigit():
        feats.append("isdig")
    if _YEAR_TOKEN.fullmatch(tok):
        feats.append("isyear")
    if ps.is_marker(i):
        rel = "mark"
    elif ps.in_pivot(i):
        rel = "pivot"
    elif i < ps.start_pos:
        d = ps.start_pos - i
        rel = f"L{d}" if d <= 3 else "L4+"
    else:
        d = i - ps.end_pos
        rel = f"R{d}" if d <= 3 else "R4+"
    feats.append(f"rel={rel}")
    feats.append(f"lw0|rel={low}|{rel}")
    for off in (-2, -1, 1, 2):
        j = i + off
        ctx = tokens[j].lower() if 0 <= j < len(tokens) else "<pad>"
        feats.append(f"w{off:+d}={ctx}")
    j = i - 1
    left = tokens[j].lower() if j >= 0 else "<pad>"
    feats.append(f"bg={left}|{low}")
    return feats


@dataclass
class PerceptronTagger:
    """Averaged structured perceptron over BIEO with constrained Viterbi."""

    weights: dict = field(default_factory=dict)
    template_version: str = FEATURE_TEMPLATE_VERSION
    seed: int = 0

    def _score_position(self, feats):
        w = self.weights
        return {tag: sum(w.get((f, tag), 0.0) for f in feats) for tag in bieo.TAGS}

    def _decode(self, ps: PivotSentence, per_pos_feats) -> list[str]:
        n = len(ps)
        allowed = [
            ("O",) if ps.is_marker(i) or ps.in_pivot(i) else bieo.TAGS
            for i in range(n)
        ]
        scores = [self._score_position(per_pos_feats[i]) for i in range(n)]
        w = self.weights
        # fold transition weights into a lattice pass
        return _viterbi_with_transitions(scores, allowed, w)

    def tag(self, ps: PivotSentence) -> list[str]:
        feats = [_position_features(ps, i) for i in range(len(ps))]
        return self._decode(ps, feats)

    def save(self, path) -> None:
        # emission keys are (feature, tag); transitions ("T", prev, tag)
        payload = {
            "template_version": self.template_version,
            "seed": self.seed,
            "weights": {"\x00".join(key): v for key, v in self.weights.items()},
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False)

    @classmethod
    def load(cls, path) -> "PerceptronTagger":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        weights = {
            tuple(key.split("\x00")): v for key, v in payload["weights"].items()
        }
        return cls(
            weights=weights,
            template_version=payload["template_version"],
            seed=payload["seed"],
        )


def _viterbi_with_transitions(emissions, allowed, weights):
    n = len(emissions)
    if n == 0:
        return []
    prev_scores: dict[str, float] = {}
    back: list[dict[str, str]] = [{}]
    for tag in allowed[0]:
        if tag in bieo.NEXT_TAGS[None]:
            prev_scores[tag] = emissions[0][tag] + weights.get(("T", "<s>", tag), 0.0)
    for i in range(1, n):
        cur: dict[str, float] = {}
        ptr: dict[str, str] = {}
        for tag in allowed[i]:
            best_prev, best_score = None, None
            for prev, score in prev_scores.items():
                if tag not in bieo.NEXT_TAGS[prev]:
                    continue
                cand = score + weights.get(("T", prev, tag), 0.0)
                if best_score is None or cand > best_score:
                    best_prev, best_score = prev, cand
            if best_prev is not None:
                cur[tag] = best_score + emissions[i][tag]
                ptr[tag] = best_prev
        prev_scores, back = cur, back + [ptr]
    finals = {t: s for t, s in prev_scores.items() if t in bieo.FINAL_TAGS}
    last = max(finals, key=lambda t: (finals[t], -bieo.TAGS.index(t)))
    path = [last]
    for i in range(n - 1, 0, -1):
        path.append(back[i][path[-1]])
    path.reverse()
    return path


@dataclass
class TrainingReport:
    epochs: list[dict]  # per-epoch {"epoch", "updates", "segment_f1"}


def train_tagger(
    data: list[LabeledExample], epochs: int = 10, seed: int = 0
) -> tuple[PerceptronTagger, TrainingReport]:
    """Train a structured perceptron; deterministic for fixed inputs.

    If training converges (an epoch with zero updates) the exact weights
    are returned, since they are consistent with every example; otherwise
    the averaged weights are, as the usual regularizer for the
    non-separable case.  The report carries training-set strict segment F1
    per epoch.
    """
    from .parse_eval import segment_prf

    if not data:
        raise EmptyDataset("no training examples")

    prepared = []
    for ex in data:
        ps = bieo.mark_pivot(ex.tokens, ex.pivot)
        gold = bieo.encode_description(bieo.Description(tuple(sorted(ex.segments))), ps)
        feats = [_position_features(ps, i) for i in range(len(ps))]
        prepared.append((ps, gold, feats))

    weights: dict = {}
    totals: dict = {}      # running sum for averaging (lazy update)
    last_touch: dict = {}
    step = 0
    rng = random.Random(seed)
    order = list(range(len(prepared)))
    epoch_rows = []

    def bump(key, delta):
        totals[key] = totals.get(key, 0.0) + weights.get(key, 0.0) * (step - last_touch.get(key, 0))
        last_touch[key] = step
        weights[key] = weights.get(key, 0.0) + delta

    model = PerceptronTagger(weights=weights, seed=seed)
    converged = False
    for epoch in range(epochs):
        rng.shuffle(order)
        updates = 0
        for idx in order:
            ps, gold, feats = prepared[idx]
            step += 1
            pred = model._decode(ps, feats)
            if pred == gold:
                continue
            updates += 1
            prev_g = prev_p = "<s>"
            for i in range(len(gold)):
                if gold[i] != pred[i]:
                    for f in feats[i]:
                        bump((f, gold[i]), 1.0)
                        bump((f, pred[i]), -1.0)
                if (prev_g, gold[i]) != (prev_p, pred[i]):
                    bump(("T", prev_g, gold[i]), 1.0)
                    bump(("T", prev_p, pred[i]), -1.0)
                prev_g, prev_p = gold[i], pred[i]
        pairs = []
        for ps, gold, feats in prepared:
            pred_tags = model._decode(ps, feats)
            pairs.append((bieo.decode_tags(pred_tags, ps), bieo.decode_tags(gold, ps)))
        f1 = segment_prf(pairs, mode="strict")["f1"]
        epoch_rows.append({"epoch": epoch, "updates": updates, "segment_f1": f1})
        if updates == 0:
            converged = True
            break  # current weights are consistent with every example

    if not converged:
        averaged = {}
        for key in weights:
            total = totals.get(key, 0.0) + weights[key] * (step - last_touch.get(key, 0))
            avg = total / max(step, 1)
            if avg != 0.0:
                averaged[key] = avg
        model = PerceptronTagger(weights=averaged, seed=seed)
    return model, TrainingReport(epochs=epoch_rows)


def tag(ps: PivotSentence, model) -> list[str]:
    """Tag a pivot sentence; output is always decoder-legal."""
    return model.tag(ps)
