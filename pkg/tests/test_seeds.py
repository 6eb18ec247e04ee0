import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from veriscale.errors import ClientError, NoJsonArray
from veriscale.llm import MockLlm, prompt_hash
from veriscale.seeds import SeedGenConfig, generate_seeds, parse_seed_response
from veriscale.values import InputMap, ParamSignature, Value, ValueType

SIG = ParamSignature((("digits", ValueType.LIST_NAT),))


def test_strict_parse_salvages_items():
    text = 'Sure!\n[{"input": {"digits": [1]}}, {"inputs": {"digits": [0]}}, {"input": {"digits": [-1]}},' \
           ' {"input": {"digits": [1], "extra": 1}}, {"input": {"digits": [0, 1]}}] trailing'
    got = parse_seed_response(text, SIG)
    assert [m["digits"].payload for m in got] == [(1,), (0, 1)]


def test_parse_needs_an_array():
    with pytest.raises(NoJsonArray):
        parse_seed_response("no json here {\"input\": 1}", SIG)


json_leaf = st.one_of(st.none(), st.booleans(), st.integers(-5, 5), st.text(max_size=3))
json_doc = st.recursive(json_leaf, lambda kids: st.lists(kids, max_size=3) | st.dictionaries(st.text(max_size=6), kids, max_size=3), max_leaves=10)


@given(st.text(max_size=40), json_doc, st.text(max_size=40))
@settings(max_examples=300)
def test_parser_never_crashes_and_returns_well_typed(prefix, doc, suffix):
    text = prefix + json.dumps(doc) + suffix
    try:
        got = parse_seed_response(text, SIG)
    except NoJsonArray:
        return
    assert all(m.well_typed(SIG) for m in got)


def test_generate_seeds_with_empty_response(binary_task):
    client = MockLlm(sequence=["[]"])
    got = generate_seeds(binary_task, client, SeedGenConfig())
    assert got == list(binary_task.base_expected_inputs) + list(binary_task.base_unexpected_inputs)


def test_generate_seeds_rounds_and_dedupe(binary_task):
    client = MockLlm(sequence=['[{"input": {"digits": [1, 0, 1]}}]', '[{"input": {"digits": [7]}}]', "prose only"])
    got = generate_seeds(binary_task, client, SeedGenConfig(rounds=3))
    assert got[-1] == InputMap(digits=Value(ValueType.LIST_NAT, [7]))
    assert len(got) == len(set(got)) == len(binary_task.base_expected_inputs) + 1
    assert len(client.calls) == 3


def test_client_error_carries_round(binary_task):
    client = MockLlm(sequence=["[]"])
    with pytest.raises(ClientError) as e:
        generate_seeds(binary_task, client, SeedGenConfig(rounds=2))
    assert e.value.round_index == 1


def test_seed_config_mix():
    assert (SeedGenConfig().invalid_target, SeedGenConfig().valid_target) == (16, 24)
    assert SeedGenConfig(candidates_per_round=10, valid_target=9).invalid_target == 1
    with pytest.raises(ValueError):
        SeedGenConfig(candidates_per_round=10, invalid_target=3, valid_target=3)


def test_mock_llm_hash_lookup():
    client = MockLlm()
    client.add("sys", "user", "answer")
    assert client.complete("sys", "user") == "answer"
    assert prompt_hash(None, "u") == prompt_hash("", "u")
    with pytest.raises(ClientError):
        client.complete("sys", "other")
