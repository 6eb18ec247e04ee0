import pytest

from veriscale.backend import ProbeResult
from veriscale.classifier import (
    ClassificationErrors,
    Stage,
    VerdictValue,
    classify,
    classify_all,
    complete_expected_pairs,
)
from veriscale.errors import BackendInconsistency, ExecutorUnavailable
from veriscale.values import InputMap, Value, ValueType


def digits(*ds):
    return InputMap(digits=Value(ValueType.LIST_NAT, list(ds)))


class ScriptedBackend:
    """Decide never settles; plausible answers are scripted per polarity."""

    parallelism = 1

    def __init__(self, pos=ProbeResult.PASS, neg=ProbeResult.PASS, check=ProbeResult.PASS, decide=ProbeResult.FAIL):
        self.pos, self.neg, self.check, self.decide = pos, neg, check, decide
        self.commands = []

    def check_syntax(self, expr, context=""):
        self.commands.append(expr)
        return self.check

    def guard_decide(self, expr, context=""):
        self.commands.append(expr)
        return self.decide

    def plausible_probe(self, goal, negated, context=""):
        self.commands.append(goal)
        return self.neg if negated else self.pos


def test_figure2_trajectory(binary_task, backend):
    v = classify(digits(1, 2, 1), binary_task, backend)
    assert (v.value, v.stage) == (VerdictValue.UNEXPECTED, Stage.DECIDE)
    assert [r.command for r in v.transcript] == [
        "#check binaryToDecimal_precond ([1, 2, 1])",
        "#guard decide (binaryToDecimal_precond ([1, 2, 1]))",
        "#guard decide (¬ binaryToDecimal_precond ([1, 2, 1]))",
    ]
    assert [r.result for r in v.transcript] == [ProbeResult.PASS, ProbeResult.FAIL, ProbeResult.PASS]
    v = classify(digits(1, 0, 1), binary_task, backend)
    assert (v.value, v.stage) == (VerdictValue.EXPECTED, Stage.DECIDE)


@pytest.mark.parametrize(
    "pos, neg, expected",
    [
        (ProbeResult.COUNTEREXAMPLE, ProbeResult.PASS, VerdictValue.UNEXPECTED),
        (ProbeResult.PASS, ProbeResult.COUNTEREXAMPLE, VerdictValue.EXPECTED),
        (ProbeResult.TIMEOUT, ProbeResult.PASS, VerdictValue.UNKNOWN),
        (ProbeResult.PASS, ProbeResult.PASS, VerdictValue.UNKNOWN),
        (ProbeResult.TIMEOUT, ProbeResult.TIMEOUT, VerdictValue.UNKNOWN),
    ],
)
def test_stage_two_policy(binary_task, pos, neg, expected):
    v = classify(digits(1), binary_task, ScriptedBackend(pos, neg))
    assert v.value is expected and v.stage is Stage.PLAUSIBLE
    assert len(v.transcript) == 5


def test_syntax_failure_is_unknown(binary_task):
    b = ScriptedBackend(check=ProbeResult.FAIL)
    v = classify(digits(1), binary_task, b)
    assert (v.value, v.stage) == (VerdictValue.UNKNOWN, Stage.SYNTAX)
    assert len(b.commands) == 1


def test_inconsistent_backends(binary_task):
    with pytest.raises(BackendInconsistency):
        classify(digits(1), binary_task, ScriptedBackend(decide=ProbeResult.PASS))
    with pytest.raises(BackendInconsistency):
        classify(digits(1), binary_task, ScriptedBackend(ProbeResult.COUNTEREXAMPLE, ProbeResult.COUNTEREXAMPLE))
    with pytest.raises(ClassificationErrors):
        classify_all([digits(1), digits(0)], binary_task, ScriptedBackend(decide=ProbeResult.PASS))


def test_classify_all_partitions(binary_task, backend):
    cands = [digits(1, 0), digits(2), digits(), digits(1, 1, 3)]
    part = classify_all(cands, binary_task, backend, workers=4)
    assert part.expected == [digits(1, 0), digits()]
    assert part.unexpected == [digits(2), digits(1, 1, 3)]
    assert part.dropped == 0


def test_complete_expected_pairs(binary_task, executor):
    pairs = complete_expected_pairs([digits(1, 0, 1), digits()], binary_task, executor)
    assert [v.payload for _, v in pairs] == [5, 0]
    with pytest.raises(ExecutorUnavailable):
        complete_expected_pairs([digits(1)], binary_task, None)


def test_insertion_sort_reference(sort_task, executor):
    m = InputMap(xs=Value(ValueType.LIST_INT, [0, -1, -2, -3, -4]))
    (_, out), = complete_expected_pairs([m], sort_task, executor)
    assert out.payload == (-4, -3, -2, -1, 0)
