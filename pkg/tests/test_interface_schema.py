import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annokit.schema import (
    ComponentSpec,
    InterfaceSpec,
    InvalidProperties,
    MalformedDocument,
    UnknownComponentKind,
    parse_interface_spec,
)


def test_parse_custom_qa_fixture(custom_qa_file):
    spec = parse_interface_spec(custom_qa_file)
    assert len(spec) == 5
    kinds = [c.kind for c in spec.components]
    assert kinds == ["selection", "textbox", "button", "selection", "textbox"]
    assert spec.components[2].contents == ["positive", "negative", "neutral"]
    assert spec.components[3].contents == ["NP", "PP", "VP"]
    assert spec.components[0].contents == []


def test_parse_minimal_spec():
    spec = parse_interface_spec('{"format":[{"type":"textbox","properties":{}}]}')
    assert len(spec) == 1
    assert spec.components[0].kind == "textbox"


def test_empty_format_rejected():
    with pytest.raises(InvalidProperties):
        parse_interface_spec('{"format":[]}')


def test_malformed_json():
    with pytest.raises(MalformedDocument):
        parse_interface_spec("{not json")


def test_missing_format_key():
    with pytest.raises(MalformedDocument):
        parse_interface_spec('{"data": {}}')


def test_unknown_kind_carries_index():
    doc = {"format": [{"type": "textbox", "properties": {}}, {"type": "wheel"}]}
    with pytest.raises(UnknownComponentKind) as exc:
        parse_interface_spec(doc)
    assert exc.value.index == 1
    assert exc.value.kind == "wheel"


@pytest.mark.parametrize(
    "kind,props",
    [
        ("button", {"contents": []}),
        ("dropdown", {"contents": []}),
        ("button", {}),
        ("slider", {"min": 3, "max": 3, "step": 1}),
        ("slider", {"min": 0, "max": 1, "step": 0}),
        ("slider", {"min": 0, "max": 1}),
        ("textbox", {"contents": ["a"]}),
        ("text", {"min": 0}),
        ("selection", {}),
    ],
)
def test_per_kind_property_violations(kind, props):
    with pytest.raises(InvalidProperties):
        parse_interface_spec({"format": [{"type": kind, "properties": props}]})


def test_unknown_property_key_rejected():
    doc = {"format": [{"type": "button", "properties": {"contents": ["a"], "color": "red"}}]}
    with pytest.raises(InvalidProperties) as exc:
        parse_interface_spec(doc)
    assert exc.value.index == 0


def _component_strategy():
    label = st.text(st.characters(min_codepoint=33, max_codepoint=126), min_size=1, max_size=6)
    labels = st.lists(label, min_size=1, max_size=4, unique=True)
    return st.one_of(
        st.just(("text", {})),
        st.just(("textbox", {})),
        labels.map(lambda ls: ("button", {"contents": ls})),
        labels.map(lambda ls: ("dropdown", {"contents": ls})),
        st.lists(label, max_size=3, unique=True).map(
            lambda ls: ("selection", {"contents": ls})
        ),
        st.tuples(
            st.integers(-10, 9), st.integers(1, 10), st.floats(0.1, 2.0)
        ).map(lambda t: ("slider", {"min": t[0], "max": t[0] + t[1], "step": t[2]})),
        st.just(("table", {})),
    )


@given(st.lists(_component_strategy(), min_size=1, max_size=6))
@settings(max_examples=150, deadline=None)
def test_spec_round_trip_identity(kinds_props):
    spec = InterfaceSpec(tuple(ComponentSpec(k, p) for k, p in kinds_props))
    once = parse_interface_spec(spec.to_json())
    twice = parse_interface_spec(json.dumps({"format": once.to_json_obj()}))
    assert once == spec
    assert twice == once


def test_all_shipped_interface_fixtures_parse(fixtures_dir):
    files = sorted((fixtures_dir / "interfaces").glob("*.json"))
    assert len(files) == 7
    for path in files:
        spec = parse_interface_spec(path.read_text(encoding="utf-8"))
        assert len(spec) >= 1
