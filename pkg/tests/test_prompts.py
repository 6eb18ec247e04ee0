from pathlib import Path

import pytest

from veriscale.adversarial import ground_truth_spec
from veriscale.errors import MissingPrecondText, MissingSlot
from veriscale.prompts import (
    fill_slots,
    render_adversarial_prompt,
    render_decomposition_prompt,
    render_seed_prompt,
    render_spec_prompt,
    split_decomposition,
)
from veriscale.seeds import SeedGenConfig
from veriscale.toy import load_mock

GOLDEN = Path(__file__).parent / "golden"


def test_seed_prompt_matches_golden(binary_task):
    system, user = render_seed_prompt(binary_task, SeedGenConfig())
    assert system + "\n=====\n" + user == (GOLDEN / "seed_prompt_binaryToDecimal.txt").read_text()


def test_seed_prompt_mix_and_example_limit(sort_task):
    _, user = render_seed_prompt(sort_task, SeedGenConfig(candidates_per_round=10, example_limit=1))
    assert "- total candidates: 10" in user
    assert "- likely-invalid target: 4" in user and "- likely-valid target: 6" in user
    assert user.count('{"input": {"xs"') == 1


def test_seed_prompt_needs_precondition_text(binary_task):
    from dataclasses import replace

    with pytest.raises(MissingPrecondText):
        render_seed_prompt(replace(binary_task, precond_text=""), SeedGenConfig())


def test_decomposition_prompt(binary_task):
    system, user = render_decomposition_prompt(binary_task)
    assert system is None
    assert "(E: Explicit" in user
    assert binary_task.description in user


def test_spec_prompt_slots(binary_task):
    decomposition = load_mock(binary_task.id)["decomposition"]
    _, user = render_spec_prompt(binary_task, decomposition)
    assert "def binaryToDecimal_precond (digits : List Nat) : Prop" in user
    assert "(result : Nat) : Prop" in user
    with pytest.raises(MissingSlot):
        render_spec_prompt(binary_task, "")


def test_adversarial_prompt(sort_task):
    _, user = render_adversarial_prompt(sort_task, ground_truth_spec(sort_task))
    assert "exactly **5**" in user
    assert "appending the suffix `i` to its name" in user
    assert "def insertionSort (xs : List Int) : List Int" in user
    assert sort_task.postcond_text in user


def test_fill_slots_is_single_pass():
    assert fill_slots("{a} {b} {c}", a="{b}", b="x") == "{b} x {c}"
    with pytest.raises(MissingSlot):
        fill_slots("{a}", a="  ")


def test_split_decomposition():
    inp, out = split_decomposition("Input:\n- x\nOutput:\n- y\n")
    assert (inp, out) == ("- x", "- y")
    with pytest.raises(MissingSlot):
        split_decomposition("no sections here")
