"""Bundled toy tasks, their Python reference implementations and scripted LLM responses.

Each task lives in ``tasks/<id>.task.json``; ``tasks/<id>.mock.json`` holds
what a scripted model answers to the seed, decomposition, specification and
red-team prompts for that task.
"""

from __future__ import annotations

import json
from functools import reduce
from pathlib import Path

from ..adversarial import CandidateSpec, fallback_drop_constraints, ground_truth_spec, parse_spec_response
from ..executor import BuiltinExecutor
from ..llm import MockLlm
from ..prompts import render_adversarial_prompt, render_decomposition_prompt, render_seed_prompt, render_spec_prompt
from ..suite import Task, load_tasks
from ..values import ValueType

TASKS_DIR = Path(__file__).parent / "tasks"

VOWELS = set("aeiou")


def _binary_to_decimal(digits):
    return reduce(lambda acc, d: 2 * acc + d, digits, 0)


def _insertion_sort(xs):
    out: list[int] = []
    for x in xs:
        i = len(out)
        while i > 0 and out[i - 1] > x:
            i -= 1
        out.insert(i, x)
    return out


def _max_of_array(a):
    best = a[0]
    for x in a[1:]:
        if x > best:
            best = x
    return best


def _nat_sub(a, b):
    if b > a:
        raise ValueError("b exceeds a")
    return a - b


# name -> (callable over positional payloads, output type)
REFERENCES = {
    "binaryToDecimal": (_binary_to_decimal, ValueType.NAT),
    "insertionSort": (_insertion_sort, ValueType.LIST_INT),
    "maxOfArray": (_max_of_array, ValueType.INT),
    "natSub": (_nat_sub, ValueType.NAT),
    "intAbs": (abs, ValueType.NAT),
    "sumArray": (sum, ValueType.NAT),
    "countVowels": (lambda cs: sum(c in VOWELS for c in cs), ValueType.NAT),
    "reverseString": (lambda s: s[::-1], ValueType.STRING),
    "dotProduct": (lambda a, b: sum(x * y for x, y in zip(a, b)), ValueType.INT),
    "removeZeros": (lambda xs: [x for x in xs if x != 0], ValueType.ARRAY_INT),
}

# Python restatements of each ground-truth precondition, used as test oracles
PRECONDITIONS = {
    "binaryToDecimal": lambda digits: all(d in (0, 1) for d in digits),
    "insertionSort": lambda xs: True,
    "maxOfArray": lambda a: len(a) > 0,
    "natSub": lambda a, b: b <= a,
    "intAbs": lambda x: -1000 <= x <= 1000,
    "sumArray": lambda a: len(a) <= 8,
    "countVowels": lambda cs: all(c.islower() or c == " " for c in cs),
    "reverseString": lambda s: len(s) > 0 and "\n" not in s,
    "dotProduct": lambda a, b: len(a) == len(b),
    "removeZeros": lambda xs: len(xs) <= 10,
}

# the seven implementations of the adversary-killing example for insertion sort
FIG3_INPUT = [0, -1, -2, -3, -4]
FIG3_IMPLS = (
    "def insertionSort (xs : List Int) :\n List Int := xs.reverse",
    "def insertionSort (xs : List Int) :\n List Int := match xs with\n  | [] => []\n  | x :: _ => List.replicate xs.length x",
    "def insertionSort (xs : List Int) :\n List Int := List.replicate xs.length 0",
    "def insertionSort (xs : List Int) :\n List Int := (List.range xs.length).map (fun n => Int.ofNat n)",
    "def insertionSort (xs : List Int) :\n List Int := []",
    "def insertionSort (xs : List Int) :\n List Int := xs",
    "def insertionSort (xs : List Int) : List Int :=\n  match xs with\n  | [] => []\n  | x :: _ => [x]",
)


def bundled_tasks() -> list[Task]:
    return load_tasks(TASKS_DIR)


def bundled_task(task_id: str) -> Task:
    for t in bundled_tasks():
        if t.id == task_id:
            return t
    raise KeyError(task_id)


def make_executor(timeout_s: float | None = 2.0) -> BuiltinExecutor:
    return BuiltinExecutor(dict(REFERENCES), timeout_s=timeout_s)


def load_mock(task_id: str, directory: Path | str = TASKS_DIR) -> dict:
    path = Path(directory) / f"{task_id}.mock.json"
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def mock_clients(task: Task, seed_cfg, directory: Path | str = TASKS_DIR):
    """Scripted clients for one task: ``(seed_client, generator, [(label, spec_client)])``.

    Prompts are rendered exactly as the pipeline will render them and the
    answers are keyed by prompt hash, so any change in prompt text shows up
    as a ClientError rather than a silently different run.
    """
    script = load_mock(task.id, directory)
    seed_client = MockLlm(sequence=script.get("seed_rounds", []), name=f"{task.id}/seeds")
    generator = MockLlm(name=f"{task.id}/generator")
    spec_clients = []

    decomposition = script.get("decomposition", "")
    if decomposition:
        generator.add(*render_decomposition_prompt(task), decomposition)

    targets: dict[str, CandidateSpec] = {}
    for k, entry in enumerate(script.get("specs", []), start=1):
        client = MockLlm(name=entry["model"])
        if decomposition:
            client.add(*render_spec_prompt(task, decomposition), entry["response"])
        spec_clients.append((entry["model"], client))
        spec = parse_spec_response(entry["response"], task, f"{task.id}/spec{k}", entry["model"])
        targets[f"spec{k}"] = spec
    adversarial = script.get("adversarial", {})
    if any(key.startswith("drop") for key in adversarial):
        for spec in fallback_drop_constraints(ground_truth_spec(task)):
            targets[spec.id.rsplit("/", 1)[-1]] = spec
    for key, response in adversarial.items():
        if key in targets:
            generator.add(*render_adversarial_prompt(task, targets[key]), response)
    # seed prompt sanity: raises MissingPrecondText early for an incomplete task
    render_seed_prompt(task, seed_cfg)
    return seed_client, generator, spec_clients
