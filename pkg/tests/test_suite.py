import json

import pytest

from veriscale.errors import SchemaError, UnknownType
from veriscale.stats import compute_stats
from veriscale.suite import TestSuite, load_suite, save_suite, task_from_json, task_to_json
from veriscale.values import InputMap, Value, ValueType


def _task_doc(**changes):
    doc = {
        "id": "binaryToDecimal",
        "description": "binary digits to a number",
        "signature": ["digits: List Nat"],
        "output_type": "Nat",
        "precond_ref": "p",
        "postcond_ref": "q",
        "impl_ref": "f",
        "base_expected_inputs": [{"digits": [1, 0]}],
    }
    doc.update(changes)
    return doc


def test_task_signature_shorthand():
    task = task_from_json(_task_doc())
    assert task.signature.params == (("digits", ValueType.LIST_NAT),)
    assert task.base_expected_inputs[0]["digits"].payload == (1, 0)
    assert task_from_json(task_to_json(task)) == task


def test_task_errors_carry_pointers():
    with pytest.raises(UnknownType) as e:
        task_from_json(_task_doc(signature=[{"name": "x", "type": "Float"}]))
    assert e.value.pointer == "/signature/0/type"
    with pytest.raises(SchemaError) as e:
        task_from_json(_task_doc(base_expected_inputs=[{"digits": [1]}, {"digits": [-1]}]))
    assert e.value.pointer == "/base_expected_inputs/1"


def test_suite_round_trip(tmp_path):
    m = InputMap(xs=Value(ValueType.LIST_INT, [2, 1]))
    suite = TestSuite(
        [(m, Value(ValueType.LIST_INT, [1, 2]))],
        [InputMap(xs=Value(ValueType.LIST_INT, []))],
        [(m, Value(ValueType.LIST_INT, [0, 0]))],
        "t",
    )
    path = tmp_path / "s.json"
    save_suite(suite, path)
    back = load_suite(path)
    assert back.to_json() == suite.to_json()
    assert back.counts() == (1, 1, 1)


def test_suite_rejects_duplicates_and_bad_shape(tmp_path):
    m = {"xs": {"type": "List Int", "value": [1]}}
    doc = {"expected_pairs": [], "unexpected_inputs": [m, m], "unexpected_outputs": []}
    with pytest.raises(SchemaError) as e:
        TestSuite.from_json(doc)
    assert e.value.pointer == "/unexpected_inputs/1"
    with pytest.raises(SchemaError) as e:
        TestSuite.from_json({"expected_pairs": [{"input": m}]})
    assert e.value.pointer == "/expected_pairs/0"
    path = tmp_path / "bad.json"
    path.write_text("{nope")
    with pytest.raises(SchemaError):
        load_suite(path)


def test_empty_suite_loads_and_reports_zeros():
    suite = TestSuite.from_json(json.loads('{"expected_pairs": [], "unexpected_inputs": [], "unexpected_outputs": []}'))
    stats = compute_stats([suite])
    assert stats.means() == (0.0, 0.0, 0.0)
