import itertools
import random

import pytest

from veriscale.adversarial import AdversarialImpl, Origin
from veriscale.reduction import (
    KillMatrix,
    ReductionConfig,
    ReductionReport,
    build_kill_matrix,
    co_filter_outputs,
    greedy_cover,
    reduce_expected_pairs,
    reduce_unexpected_inputs,
    signature_of,
)
from veriscale.toy import FIG3_IMPLS, FIG3_INPUT

from veriscale.values import InputMap, ParamSignature, Value, ValueType

SIG2 = ParamSignature((("a", ValueType.LIST_INT), ("b", ValueType.LIST_INT)))


def ab(a, b):
    return InputMap(a=Value(ValueType.LIST_INT, a), b=Value(ValueType.LIST_INT, b))


def test_structural_signature():
    s = signature_of(ab([], [1, -1]), SIG2)
    assert s.critical == ("has_empty_container", "has_negative", "mismatched_lengths")
    s = signature_of(ab([0, 1, 1], [2, 3, 4]), SIG2)
    assert s.critical == ("has_zero",)
    assert s.has_duplicates and not s.sorted_descending
    one = signature_of(InputMap(x=Value(ValueType.INT, 5)))
    assert one.mismatched_lengths is None and one.length_class is None and one.critical == ()


def test_small_input_sets_are_kept():
    inputs = [ab([i], [i]) for i in range(1, 10)]
    assert reduce_unexpected_inputs(inputs, ReductionConfig(), SIG2) == inputs


def test_boundary_buckets_survive():
    rng = random.Random(5)
    bland = [ab([rng.randint(1, 50) for _ in range(3)], [rng.randint(1, 50) for _ in range(3)]) for _ in range(300)]
    special = [ab([], [1]), ab([5, 0], [1, 2]), ab([-3], [4]), ab([1, 2], [3])]
    inputs = bland[:150] + special + bland[150:]
    report = ReductionReport()
    kept = reduce_unexpected_inputs(inputs, ReductionConfig(max_unexpected_inputs=20), SIG2, report)
    assert len(kept) == 20
    assert all(n >= 1 for f, n in report.retained_per_bucket.items() if report.critical_buckets[f])
    assert [inputs.index(m) for m in kept] == sorted(inputs.index(m) for m in kept)


def test_overflowing_critical_buckets_take_one_each():
    inputs = [ab([-i], [0, i]) for i in range(1, 40)]  # negative, zero, mismatched
    report = ReductionReport()
    kept = reduce_unexpected_inputs(inputs, ReductionConfig(max_unexpected_inputs=2, keep_per_critical_bucket=5), SIG2, report)
    assert len(kept) == 2


def brute_force_min_cover(matrix):
    target = matrix.killed_by(range(matrix.rows))
    for k in range(matrix.rows + 1):
        for rows in itertools.combinations(range(matrix.rows), k):
            if matrix.killed_by(rows) == target:
                return k
    raise AssertionError


def random_matrix(rng, rows, cols, density):
    return KillMatrix(rows, [f"i{j}" for j in range(cols)], [[rng.random() < density for _ in range(cols)] for _ in range(rows)])


@pytest.mark.parametrize("seed", range(30))
def test_greedy_cover_against_brute_force(seed):
    rng = random.Random(seed)
    m = random_matrix(rng, rng.randint(1, 8), rng.randint(1, 6), rng.uniform(0.1, 0.6))
    cover = greedy_cover(m)
    assert m.killed_by(cover) == m.killed_by(range(m.rows))
    optimum = brute_force_min_cover(m)
    assert optimum <= len(cover)
    # greedy is within the harmonic bound of the optimum
    h = sum(1 / i for i in range(1, len(m.cols) + 1))
    assert len(cover) <= optimum * h + 1e-9


def test_expected_reduction_budget_and_order():
    rng = random.Random(1)
    m = random_matrix(rng, 120, 20, 0.05)
    pairs = [(InputMap(x=Value(ValueType.INT, i)), Value(ValueType.INT, i)) for i in range(120)]
    report = ReductionReport()
    kept = reduce_expected_pairs(pairs, m, ReductionConfig(max_expected_pairs=10), report)
    idx = [p[0]["x"].payload for p in kept]
    assert idx == sorted(idx)
    assert m.killed_by(idx) == m.killed_by(range(120))
    assert len(kept) == max(10, report.cover_size)


def test_figure3_kill_row(executor):
    impls = []
    for k, src in enumerate(FIG3_IMPLS):
        handle = executor.compile(src)["insertionSort"]
        impls.append(AdversarialImpl(f"fig3/{k}", "fig3", handle, Origin.RED_TEAM, src))
    pair = (InputMap(xs=Value(ValueType.LIST_INT, FIG3_INPUT)), Value(ValueType.LIST_INT, sorted(FIG3_INPUT)))
    sym = (InputMap(xs=Value(ValueType.LIST_INT, [1, 2, 1])), Value(ValueType.LIST_INT, [1, 1, 2]))
    matrix = build_kill_matrix([pair, sym], impls, executor)
    assert matrix.cells[0] == [False, True, True, True, True, True, True]
    assert matrix.row_counts()[0] == 6


def test_co_filter():
    a, b = InputMap(x=Value(ValueType.INT, 1)), InputMap(x=Value(ValueType.INT, 2))
    outs = [(a, Value(ValueType.INT, 9)), (b, Value(ValueType.INT, 9))]
    assert co_filter_outputs(outs, [(a, Value(ValueType.INT, 1))]) == outs[:1]


def test_config_validation():
    with pytest.raises(ValueError):
        ReductionConfig(max_unexpected_inputs=0)
