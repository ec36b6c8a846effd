import numpy as np
import pytest

from annokit.sim.metrics import (
    LengthMismatch,
    bio_spans,
    classification_accuracy,
    evaluate_sequence_labeling,
)


def brute_force_spans(tags):
    """Independent oracle: test every (start, end, type) candidate directly.

    A span of type T over [i, j) is valid iff position i begins a T run
    (B-T, or I-T with no live T continuation from i-1), positions i+1..j-1
    all continue it with I-T, and j does not continue it.
    """
    def is_entity(tag):
        return len(tag) > 2 and tag[1] == "-" and tag[0] in "BI"

    def typ(tag):
        return tag[2:]

    n = len(tags)
    found = []
    for i in range(n):
        if not is_entity(tags[i]):
            continue
        t = typ(tags[i])
        starts = tags[i].startswith("B-") or not (
            i > 0 and is_entity(tags[i - 1]) and typ(tags[i - 1]) == t
        )
        if not starts:
            continue
        j = i + 1
        while j < n and tags[j] == f"I-{t}":
            j += 1
        found.append((i, j, t))
    return found


def test_identity_scores_perfect():
    golds = [["B-PER", "I-PER", "O"], ["O", "B-ORG", "O"]]
    scores = evaluate_sequence_labeling(golds, golds)
    assert scores.accuracy == 1.0
    assert scores.f1 == 1.0


def test_all_O_predictions_cheat_accuracy_but_zero_f1():
    golds = [["B-PER", "I-PER", "O", "O"], ["O", "B-ORG", "O", "O"]]
    preds = [["O"] * 4, ["O"] * 4]
    o_fraction = sum(t == "O" for g in golds for t in g) / 8
    scores = evaluate_sequence_labeling(preds, golds)
    assert scores.accuracy == pytest.approx(o_fraction)
    assert scores.f1 == 0.0
    assert scores.precision == 0.0 and scores.recall == 0.0


def test_partial_span_does_not_count():
    # hand span-extraction: gold has one PER span (0,2); pred has (0,1) only
    scores = evaluate_sequence_labeling([["B-PER", "O", "O"]], [["B-PER", "I-PER", "O"]])
    assert scores.correct_entities == 0
    assert scores.precision == 0.0 and scores.recall == 0.0 and scores.f1 == 0.0
    assert scores.accuracy == pytest.approx(2 / 3)


def test_span_extraction_cases():
    assert bio_spans(["B-X", "I-X", "O"]) == [(0, 2, "X")]
    assert bio_spans(["B-X", "B-X"]) == [(0, 1, "X"), (1, 2, "X")]
    assert bio_spans(["O", "I-X", "I-X"]) == [(1, 3, "X")]  # stray I opens a span
    assert bio_spans(["B-X", "I-Y"]) == [(0, 1, "X"), (1, 2, "Y")]
    assert bio_spans(["I-X", "B-X", "I-X"]) == [(0, 1, "X"), (1, 3, "X")]
    assert bio_spans([]) == []
    assert bio_spans(["junk", "B-X"]) == [(1, 2, "X")]


def test_length_mismatch_raised():
    with pytest.raises(LengthMismatch):
        evaluate_sequence_labeling([["O"]], [["O", "O"]])
    with pytest.raises(LengthMismatch):
        evaluate_sequence_labeling([["O"]], [["O"], ["O"]])


def test_spans_match_brute_force_oracle_randomized():
    rng = np.random.default_rng(99)
    tagset = ["O", "B-A", "I-A", "B-B", "I-B", "B-C", "I-C"]
    for trial in range(2000):
        n = int(rng.integers(0, 12))
        tags = [tagset[i] for i in rng.integers(0, len(tagset), size=n)]
        assert bio_spans(tags) == brute_force_spans(tags), f"trial {trial}: {tags}"


def test_scores_match_oracle_on_random_pairs():
    rng = np.random.default_rng(5)
    tagset = ["O", "B-A", "I-A", "B-B", "I-B"]
    for trial in range(300):
        n_seq = int(rng.integers(1, 5))
        golds, preds = [], []
        for _ in range(n_seq):
            n = int(rng.integers(1, 9))
            golds.append([tagset[i] for i in rng.integers(0, 5, size=n)])
            preds.append([tagset[i] for i in rng.integers(0, 5, size=n)])
        scores = evaluate_sequence_labeling(preds, golds)

        gold_spans = [set(brute_force_spans(g)) for g in golds]
        pred_spans = [set(brute_force_spans(p)) for p in preds]
        tp = sum(len(g & p) for g, p in zip(gold_spans, pred_spans))
        n_gold = sum(map(len, gold_spans))
        n_pred = sum(map(len, pred_spans))
        precision = tp / n_pred if n_pred else 0.0
        recall = tp / n_gold if n_gold else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        assert scores.precision == pytest.approx(precision)
        assert scores.recall == pytest.approx(recall)
        assert scores.f1 == pytest.approx(f1)


def test_classification_accuracy():
    assert classification_accuracy(["a", "b"], ["a", "c"]) == 0.5
    with pytest.raises(LengthMismatch):
        classification_accuracy(["a"], ["a", "b"])
