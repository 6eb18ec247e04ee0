import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from veriscale.errors import TypeMismatch, UnknownType, ValueSyntaxError
from veriscale.values import (
    ALLOWED_CHARS,
    InputMap,
    ParamSignature,
    Value,
    ValueType,
    parse_value,
    render_value,
)

ints = st.integers(-10**6, 10**6)
nats = st.integers(0, 10**6)
chars = st.sampled_from(sorted(ALLOWED_CHARS))


def values_of(vtype):
    return {
        ValueType.INT: ints,
        ValueType.NAT: nats,
        ValueType.LIST_INT: st.lists(ints, max_size=8),
        ValueType.ARRAY_INT: st.lists(ints, max_size=8),
        ValueType.LIST_NAT: st.lists(nats, max_size=8),
        ValueType.ARRAY_NAT: st.lists(nats, max_size=8),
        ValueType.LIST_CHAR: st.lists(chars, max_size=8),
        ValueType.STRING: st.text(alphabet=chars, max_size=12),
    }[vtype].map(lambda p: Value(vtype, p))


any_value = st.sampled_from(list(ValueType)).flatmap(values_of)


@given(any_value, st.sampled_from(["prover", "json"]))
@settings(max_examples=300)
def test_render_parse_round_trip(v, style):
    assert parse_value(render_value(v, style), v.type) == v


@given(any_value)
def test_json_round_trip(v):
    assert Value.from_json(v.to_json()) == v


def test_figure_literals():
    assert parse_value("[1, 2, 1]", ValueType.LIST_NAT).payload == (1, 2, 1)
    v = Value(ValueType.LIST_INT, [0, -1, -2, -3, -4])
    assert render_value(v, "prover") == "[0, -1, -2, -3, -4]"


def test_array_rendering_and_mismatch():
    v = Value(ValueType.ARRAY_INT, [1, -2])
    assert render_value(v, "prover") == "#[1, -2]"
    assert parse_value("#[1, -2]", ValueType.ARRAY_INT) == v
    with pytest.raises(TypeMismatch):
        parse_value("#[1]", ValueType.LIST_INT)


def test_domain_checks():
    with pytest.raises(TypeMismatch):
        Value(ValueType.NAT, -1)
    with pytest.raises(TypeMismatch):
        Value(ValueType.LIST_NAT, [1, -1])
    with pytest.raises(TypeMismatch):
        Value(ValueType.INT, True)
    with pytest.raises(ValueSyntaxError):
        parse_value("[1, 2", ValueType.LIST_INT)
    with pytest.raises(UnknownType):
        ValueType.parse("Float")


def test_string_escapes_render_for_prover():
    v = Value(ValueType.STRING, 'a"b\\c\nd\t')
    text = render_value(v, "prover")
    assert "\n" not in text
    assert parse_value(text, ValueType.STRING) == v


def test_input_map_identity_and_signature():
    sig = ParamSignature((("a", ValueType.NAT), ("b", ValueType.NAT)))
    m1 = InputMap.from_payloads({"a": 3, "b": 1}, sig)
    m2 = InputMap.from_payloads({"b": 1, "a": 3}, sig)
    assert m1 == m2 and hash(m1) == hash(m2)
    assert list(m1) == ["a", "b"]
    assert m1.replace("a", Value(ValueType.NAT, 4))["a"].payload == 4
    assert InputMap.from_json(m1.to_json(), sig) == m1
    assert sig.binders() == "(a : Nat) (b : Nat)"
    with pytest.raises(TypeMismatch):
        InputMap.from_payloads({"a": 3}, sig)
    with pytest.raises(TypeMismatch):
        InputMap.from_payloads({"a": 3, "b": -1}, sig)
