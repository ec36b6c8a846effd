"""Sequence-labeling metrics: token accuracy plus entity-level P/R/F1.

Entity scores are computed over BIO spans and exclude "O" entirely, so a
predictor that emits many "O"s can post high token accuracy while earning
zero F1. Tags that are neither "O" nor B-/I- prefixed are treated as "O"
for span extraction but still count as errors for token accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass


class LengthMismatch(ValueError):
    pass


Span = tuple[int, int, str]  # [start, end) token offsets + entity type


def bio_spans(tags: list[str] | tuple[str, ...]) -> list[Span]:
    """Maximal BIO spans; an I-X without a live X span opens one (conlleval)."""
    spans: list[Span] = []
    cur_type: str | None = None
    cur_start = 0
    for i, tag in enumerate(tags):
        prefix, sep, ent = tag.partition("-")
        is_entity = sep == "-" and prefix in ("B", "I")
        if not is_entity:
            if cur_type is not None:
                spans.append((cur_start, i, cur_type))
                cur_type = None
            continue
        if prefix == "B" or ent != cur_type:
            if cur_type is not None:
                spans.append((cur_start, i, cur_type))
            cur_type = ent
            cur_start = i
    if cur_type is not None:
        spans.append((cur_start, len(tags), cur_type))
    return spans


@dataclass(frozen=True)
class SequenceScores:
    accuracy: float
    precision: float
    recall: float
    f1: float
    gold_entities: int
    pred_entities: int
    correct_entities: int

    def as_dict(self) -> dict[str, float]:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def evaluate_sequence_labeling(
    preds: list[list[str]], golds: list[list[str]]
) -> SequenceScores:
    """Micro-averaged scores over aligned tag sequences."""
    if len(preds) != len(golds):
        raise LengthMismatch(f"{len(preds)} predicted sequences vs {len(golds)} gold")
    correct_tokens = 0
    total_tokens = 0
    gold_total = 0
    pred_total = 0
    correct = 0
    for i, (pred, gold) in enumerate(zip(preds, golds)):
        if len(pred) != len(gold):
            raise LengthMismatch(f"sequence {i}: {len(pred)} pred tags vs {len(gold)} gold")
        total_tokens += len(gold)
        correct_tokens += sum(p == g for p, g in zip(pred, gold))
        gold_spans = set(bio_spans(gold))
        pred_spans = set(bio_spans(pred))
        gold_total += len(gold_spans)
        pred_total += len(pred_spans)
        correct += len(gold_spans & pred_spans)
    precision = correct / pred_total if pred_total else 0.0
    recall = correct / gold_total if gold_total else 0.0
    f1 = (
        2 * precision * recall / (precision + recall) if precision + recall else 0.0
    )
    accuracy = correct_tokens / total_tokens if total_tokens else 0.0
    return SequenceScores(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        gold_entities=gold_total,
        pred_entities=pred_total,
        correct_entities=correct,
    )


def classification_accuracy(preds: list[str], golds: list[str]) -> float:
    if len(preds) != len(golds):
        raise LengthMismatch(f"{len(preds)} predictions vs {len(golds)} gold labels")
    if not golds:
        return 0.0
    return sum(p == g for p, g in zip(preds, golds)) / len(golds)
