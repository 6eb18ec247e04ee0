import pytest

from veriscale.errors import EmptySuiteSet
from veriscale.stats import compute_stats, multiplier, render_table, render_tsv, stats_from_counts
from veriscale.suite import TestSuite
from veriscale.values import InputMap, Value, ValueType


def suite_with(n_pairs, n_out, n_in):
    mk = lambda i: InputMap(x=Value(ValueType.INT, i))
    return TestSuite(
        [(mk(i), Value(ValueType.INT, i)) for i in range(n_pairs)],
        [mk(-i - 1) for i in range(n_in)],
        [(mk(i), Value(ValueType.INT, i + 1)) for i in range(n_out)],
    )


def test_table1_multipliers():
    assert [multiplier(p, b) for p, b in [(370.07, 5.89), (1114.01, 12.69), (119.00, 0.65)]] == [62.83, 87.79, 183.08]


def test_mean_min_max():
    s = compute_stats([suite_with(2, 0, 1), suite_with(4, 3, 0)], name="x")
    e = s.categories["expected_pairs"]
    assert (e.mean, e.min, e.max, e.multiplier) == (3.0, 2, 4, None)
    assert s.categories["unexpected_outputs"].max == 3


def test_single_suite_without_baseline():
    s = compute_stats([suite_with(5, 2, 1)])
    for c in s.categories.values():
        assert c.min == c.max == c.mean and c.multiplier is None


def test_baseline_multiplier_and_zero_baseline():
    s = compute_stats([suite_with(10, 4, 2)], [suite_with(2, 0, 1)])
    assert s.categories["expected_pairs"].multiplier == 5.0
    assert s.categories["unexpected_outputs"].multiplier is None
    assert s.categories["unexpected_inputs"].multiplier == 2.0


def test_empty_suite_set():
    with pytest.raises(EmptySuiteSet):
        compute_stats([])


def test_rendering():
    rows = [stats_from_counts([(6, 13, 1)], name="base"), stats_from_counts([(370, 1114, 119)], (6, 13, 1), name="plus")]
    table = render_table(rows)
    assert "370.00 (370-370) x61.67" in table
    assert table.splitlines()[0].startswith("Dataset")
    tsv = render_tsv(rows).splitlines()
    assert len(tsv) == 3 and tsv[2].split("\t")[:3] == ["plus", "1", "370.00"]
