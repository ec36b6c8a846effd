import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annokit.schema import (
    NO_RESULT,
    ArityMismatch,
    ComponentSpec,
    IndexOutOfRange,
    InterfaceSpec,
    InvalidResult,
    TablePayload,
    TaskDocument,
    empty_result_for,
    merge_annotation,
    new_document,
    parse_interface_spec,
    parse_task_document,
    task_file_obj,
    validate_task_document,
)


@pytest.fixture
def qa_spec(custom_qa_file):
    return parse_interface_spec(custom_qa_file)


@pytest.fixture
def qa_doc(custom_qa_file):
    return parse_task_document(custom_qa_file)


def test_fixture_validates_against_own_format(qa_doc, qa_spec):
    assert validate_task_document(qa_doc, qa_spec) == []


def test_poems_fixture_validates(sentiment_poems_file):
    spec = parse_interface_spec(sentiment_poems_file)
    doc = parse_task_document(sentiment_poems_file)
    assert validate_task_document(doc, spec) == []
    assert doc.done == (0, 0, 0)


def test_length_mismatch_reported(qa_doc, qa_spec):
    bad = TaskDocument(
        source=qa_doc.source,
        question=qa_doc.question,
        result=qa_doc.result,
        done=(0, 0, 0),
    )
    violations = validate_task_document(bad, qa_spec)
    assert [v.rule for v in violations] == ["length_mismatch"]


def test_arity_mismatch_reported(qa_doc, qa_spec):
    short_row = qa_doc.result[0][:4]
    bad = TaskDocument(
        source=qa_doc.source,
        question=qa_doc.question,
        result=(short_row, qa_doc.result[1]),
        done=qa_doc.done,
    )
    violations = validate_task_document(bad, qa_spec)
    assert [v.rule for v in violations] == ["arity_mismatch"]
    assert violations[0].instance == 0


def test_empty_results_per_kind():
    assert empty_result_for(ComponentSpec("textbox", {})) == ""
    assert empty_result_for(ComponentSpec("button", {"contents": ["p", "n", "x"]})) == 0
    assert empty_result_for(ComponentSpec("selection", {"contents": []})) == []
    assert empty_result_for(ComponentSpec("dropdown", {"contents": ["a"]})) == []
    assert empty_result_for(ComponentSpec("slider", {"min": -3, "max": 3, "step": 1})) == -3
    assert empty_result_for(ComponentSpec("text", {})) is NO_RESULT


def test_round_trip_fixture_bytes(custom_qa_file, qa_doc, qa_spec):
    assert task_file_obj(qa_doc, qa_spec) == custom_qa_file
    reparsed = parse_task_document(json.dumps(task_file_obj(qa_doc, qa_spec)))
    assert reparsed == qa_doc


def _two_instance_doc():
    spec = InterfaceSpec(
        (
            ComponentSpec("selection", {"contents": []}),
            ComponentSpec("button", {"contents": ["yes", "no"]}),
        )
    )
    doc = new_document(spec, ["hello world", "another line"], [["q1", "q2"], ["q1", "q2"]])
    return spec, doc


def test_merge_sets_done_flag():
    spec, doc = _two_instance_doc()
    merged = merge_annotation(doc, 0, [[(0, 5)], 1], spec)
    assert merged.done == (1, 0)
    assert merged.result[0] == ([(0, 5)], 1)


def test_merge_last_write_wins_done_stays_set():
    spec, doc = _two_instance_doc()
    once = merge_annotation(doc, 0, [[(0, 5)], 1], spec)
    twice = merge_annotation(once, 0, [[(6, 11)], 0], spec)
    assert twice.done == (1, 0)
    assert twice.result[0] == ([(6, 11)], 0)


def test_merge_rejects_backwards_span():
    spec, doc = _two_instance_doc()
    with pytest.raises(InvalidResult):
        merge_annotation(doc, 0, [[(5, 2)], 1], spec)


def test_merge_rejects_overlapping_spans():
    spec, doc = _two_instance_doc()
    with pytest.raises(InvalidResult):
        merge_annotation(doc, 0, [[(0, 5), (3, 8)], 1], spec)


def test_merge_rejects_out_of_range_instance():
    spec, doc = _two_instance_doc()
    with pytest.raises(IndexOutOfRange):
        merge_annotation(doc, 2, [[], 0], spec)


def test_merge_rejects_wrong_arity():
    spec, doc = _two_instance_doc()
    with pytest.raises(ArityMismatch):
        merge_annotation(doc, 0, [[]], spec)


def test_merge_normalizes_choice_label_to_index():
    spec, doc = _two_instance_doc()
    merged = merge_annotation(doc, 0, [[], "no"], spec)
    assert merged.result[0][1] == 1


def test_merge_frame_property():
    spec, doc = _two_instance_doc()
    merged = merge_annotation(doc, 1, [[(0, 7)], 0], spec)
    assert merged.source == doc.source
    assert merged.question == doc.question
    assert merged.result[0] == doc.result[0]
    assert merged.done[0] == doc.done[0]


def test_labeled_span_requires_known_label():
    spec = InterfaceSpec((ComponentSpec("dropdown", {"contents": ["NP", "VP"]}),))
    doc = new_document(spec, ["a b c d"], [["q"]])
    merged = merge_annotation(doc, 0, [[(0, 3, "NP")]], spec)
    assert merged.result[0][0] == [(0, 3, "NP")]
    with pytest.raises(InvalidResult):
        merge_annotation(doc, 0, [[(0, 3, "XX")]], spec)


def test_span_against_table_source_rejected():
    spec = InterfaceSpec((ComponentSpec("selection", {"contents": []}),))
    table = TablePayload(columns=("a",), rows=(("1",),))
    doc = new_document(spec, [table], [["q"]])
    violations = validate_task_document(
        TaskDocument(doc.source, doc.question, (([(0, 1)],),), doc.done), spec
    )
    assert [v.rule for v in violations] == ["invalid_result"]


def test_slider_bounds_checked():
    spec = InterfaceSpec((ComponentSpec("slider", {"min": 0, "max": 5, "step": 0.5}),))
    doc = new_document(spec, ["x"], [["q"]])
    assert merge_annotation(doc, 0, [3.5], spec).result[0][0] == 3.5
    with pytest.raises(InvalidResult):
        merge_annotation(doc, 0, [5.5], spec)


def _spec_strategy():
    label = st.text(st.characters(min_codepoint=97, max_codepoint=122), min_size=1, max_size=5)
    labels = st.lists(label, min_size=2, max_size=4, unique=True)
    comp = st.one_of(
        st.just(ComponentSpec("text", {})),
        st.just(ComponentSpec("textbox", {})),
        labels.map(lambda ls: ComponentSpec("button", {"contents": ls})),
        labels.map(lambda ls: ComponentSpec("dropdown", {"contents": ls})),
        st.just(ComponentSpec("selection", {"contents": []})),
        st.just(ComponentSpec("slider", {"min": -3, "max": 3, "step": 1})),
    )
    return st.lists(comp, min_size=1, max_size=5).map(lambda cs: InterfaceSpec(tuple(cs)))


@given(
    spec=_spec_strategy(),
    sources=st.lists(st.text(min_size=1, max_size=30), min_size=1, max_size=4),
)
@settings(max_examples=150, deadline=None)
def test_fresh_documents_validate(spec, sources):
    doc = new_document(spec, sources, [["q"] * len(spec) for _ in sources])
    assert validate_task_document(doc, spec) == []
    reparsed = parse_task_document(json.dumps(task_file_obj(doc, spec)))
    assert reparsed == doc


def test_done_flags_monotone_across_merges():
    spec, doc = _two_instance_doc()
    seen_done = [doc.done]
    for instance in (1, 0, 1):
        doc = merge_annotation(doc, instance, [[], 0], spec)
        seen_done.append(doc.done)
    for before, after in zip(seen_done, seen_done[1:]):
        assert all(b <= a for b, a in zip(before, after))
