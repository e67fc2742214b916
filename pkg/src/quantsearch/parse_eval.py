"""Segment- and quantity-level scoring of predicted descriptions.

Strict mode counts a predicted segment as correct only on exact span
match.  Partial mode accepts overlap: two segments match when the token
length of their intersection exceeds a third of their union.  All scores
are micro-averaged over (sentence, quantity) pairs; pairs where both sides
are empty contribute zero counts everywhere, so they can neither help nor
hurt.
"""

from __future__ import annotations

from .bieo import Description, Segment


def partial_match(a: Segment, b: Segment) -> bool:
    """True when |a intersect b| > |a union b| / 3, measured in tokens."""
    inter = max(0, min(a[1], b[1]) - max(a[0], b[0]))
    if inter == 0:
        return False
    union = (a[1] - a[0]) + (b[1] - b[0]) - inter
    return 3 * inter > union


def _segments(desc) -> tuple[Segment, ...]:
    return desc.segments if isinstance(desc, Description) else tuple(desc)


def _matches(seg: Segment, pool, mode: str) -> bool:
    if mode == "strict":
        return seg in pool
    return any(partial_match(seg, other) for other in pool)


def segment_prf(pairs, mode: str = "strict") -> dict[str, float]:
    """Micro-averaged precision/recall/F1 over (pred, gold) description pairs."""
    if mode not in ("strict", "partial"):
        raise ValueError(f"unknown mode {mode!r}")
    correct_pred = total_pred = 0
    covered_gold = total_gold = 0
    for pred, gold in pairs:
        p, g = _segments(pred), _segments(gold)
        total_pred += len(p)
        total_gold += len(g)
        correct_pred += sum(1 for seg in p if _matches(seg, g, mode))
        covered_gold += sum(1 for seg in g if _matches(seg, p, mode))
    if total_pred == 0 and total_gold == 0:
        return {"precision": 1.0, "recall": 1.0, "f1": 1.0}
    precision = correct_pred / total_pred if total_pred else 0.0
    recall = covered_gold / total_gold if total_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f1": f1}


def _bijective_partial(pred, gold) -> bool:
    """Perfect matching between pred and gold segments under partial_match."""
    if len(pred) != len(gold):
        return False
    if not pred:
        return True
    assigned: dict[int, int] = {}  # gold index -> pred index

    def try_assign(i: int, seen: set[int]) -> bool:
        for j in range(len(gold)):
            if j in seen or not partial_match(pred[i], gold[j]):
                continue
            seen.add(j)
            if j not in assigned or try_assign(assigned[j], seen):
                assigned[j] = i
                return True
        return False

    return all(try_assign(i, set()) for i in range(len(pred)))


def quantity_accuracy(pairs, mode: str = "strict") -> float:
    """Fraction of quantities whose full description is correct.

    Strict requires the exact segment set; partial requires a one-to-one
    pairing of predicted and gold segments under partial_match.
    """
    if mode not in ("strict", "partial"):
        raise ValueError(f"unknown mode {mode!r}")
    if not pairs:
        return 0.0
    hit = 0
    for pred, gold in pairs:
        p, g = _segments(pred), _segments(gold)
        if mode == "strict":
            hit += set(p) == set(g)
        else:
            hit += _bijective_partial(list(p), list(g))
    return hit / len(pairs)
