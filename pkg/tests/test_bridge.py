import pytest

from annokit.bridge import (
    TaskBinding,
    bindings_from_config,
    gold_labels_for,
    instance_from_source,
    model_tasks,
    results_from_predictions,
    spans_to_tags,
    tags_to_spans,
    tokenize_with_offsets,
)
from annokit.engine.model import CLASSIFICATION, SEQUENCE
from annokit.schema import ComponentSpec, InterfaceSpec


@pytest.fixture
def spec():
    return InterfaceSpec(
        (
            ComponentSpec("selection", {"contents": ["PER", "ORG"]}),
            ComponentSpec("button", {"contents": ["pos", "neg"]}),
            ComponentSpec("selection", {"contents": []}),
            ComponentSpec("textbox", {}),
        )
    )


@pytest.fixture
def config():
    return {
        "task_map": [
            {"component": 0, "task_id": "entity"},
            {"component": 1, "task_id": "sentiment"},
            {"component": 2, "task_id": "segments"},
        ]
    }


def test_bindings_and_label_sets(spec, config):
    bindings = bindings_from_config(config, spec)
    by_id = {b.task_id: b for b in bindings}
    assert by_id["entity"].kind == SEQUENCE
    assert by_id["entity"].label_set == ("B-PER", "I-PER", "B-ORG", "I-ORG", "O")
    assert by_id["sentiment"].kind == CLASSIFICATION
    assert by_id["sentiment"].label_set == ("pos", "neg")
    assert by_id["segments"].label_set == ("B-SPAN", "I-SPAN", "O")
    tasks = model_tasks(bindings)
    assert tasks["entity"] == (("B-PER", "I-PER", "B-ORG", "I-ORG", "O"), SEQUENCE)


def test_binding_rejects_textbox(spec):
    with pytest.raises(ValueError):
        bindings_from_config({"task_map": [{"component": 3, "task_id": "x"}]}, spec)


def test_tokenize_offsets():
    text = "Ada  met Bob."
    assert tokenize_with_offsets(text) == [("Ada", 0, 3), ("met", 5, 8), ("Bob.", 9, 13)]


def test_span_tag_round_trip():
    text = "Ada Lovelace met the Owls club"
    offsets = tokenize_with_offsets(text)
    spans = [(0, 12, "PER"), (21, 25, "ORG")]
    tags = spans_to_tags(offsets, spans, labeled=True)
    assert tags == ("B-PER", "I-PER", "O", "O", "B-ORG", "O")
    assert tags_to_spans(offsets, tags, labeled=True) == [(0, 12, "PER"), (21, 25, "ORG")]


def test_partial_token_overlap_joins_span():
    offsets = tokenize_with_offsets("abcdef ghij")
    tags = spans_to_tags(offsets, [(3, 9)], labeled=False)
    assert tags == ("B-SPAN", "I-SPAN")


def test_gold_labels_sequence_and_classification(spec, config):
    bindings = bindings_from_config(config, spec)
    source = "Ada Lovelace joined"
    row = [[(0, 12, "PER")], 1, [(4, 12)], "note"]
    by_id = {b.task_id: b for b in bindings}
    assert gold_labels_for(by_id["entity"], spec, source, row) == ("B-PER", "I-PER", "O")
    assert gold_labels_for(by_id["sentiment"], spec, source, row) == "neg"
    assert gold_labels_for(by_id["segments"], spec, source, row) == ("O", "B-SPAN", "O")


def test_predictions_to_results_round_trip(spec, config):
    bindings = bindings_from_config(config, spec)
    source = "Ada Lovelace joined"
    predictions = {
        "entity": (("B-PER", "I-PER", "O"), 0.9),
        "sentiment": (("neg"), 0.8),
        "segments": (("O", "B-SPAN", "O"), 0.7),
    }
    results = results_from_predictions(bindings, spec, source, predictions)
    assert results[0] == [[0, 12, "PER"]]
    assert results[1] == 1
    assert results[2] == [[4, 12]]
    assert results[3] is None


def test_instance_from_source():
    inst = instance_from_source(5, "hello big world")
    assert inst.tokens == ("hello", "big", "world")
    assert instance_from_source(1, "") is None
    assert instance_from_source(2, {"columns": [], "rows": []}) is None
