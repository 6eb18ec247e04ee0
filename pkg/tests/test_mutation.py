import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from veriscale.errors import EmptySeedSet
from veriscale.mutation import (
    IngredientPool,
    MutationConfig,
    apply_schema,
    build_ingredient_pool,
    derive_rng,
    expand_candidates,
    mutate_input,
    mutate_value,
    mutate_value_traced,
    schema_count,
)
from veriscale.values import SIGMA_CHAR, SIGMA_SP, InputMap, Value, ValueType

NO_REUSE = MutationConfig(ingredient_prob=0.0)


def V(t, p):
    return Value(t, p)


@pytest.mark.parametrize(
    "x, index, params, expected",
    [
        (V(ValueType.INT, 7), 1, (-2,), 5),
        (V(ValueType.INT, 7), 2, (-2,), -14),
        (V(ValueType.NAT, 1), 1, (-2,), 0),
        (V(ValueType.NAT, 3), 2, (-1,), 0),
        (V(ValueType.LIST_INT, [4, 5]), 1, (1, 2, -1), (4, -5)),
        (V(ValueType.LIST_NAT, [4, 5]), 1, (0, 1, -2), (2, 5)),
        (V(ValueType.LIST_NAT, [4]), 2, (-5,), (4, 0)),
        (V(ValueType.ARRAY_INT, [1, 2, 3]), 3, (1,), (1, 3)),
        (V(ValueType.ARRAY_INT, [1, 2, 3]), 4, (), (3, 2, 1)),
        (V(ValueType.LIST_CHAR, ["a", "b"]), 1, (0, "z"), ("z", "b")),
        (V(ValueType.LIST_CHAR, ["a"]), 2, (" ",), ("a", " ")),
        (V(ValueType.STRING, "abc"), 1, (), ""),
        (V(ValueType.STRING, "abc"), 2, (), "cba"),
        (V(ValueType.STRING, "ab"), 3, ("!",), "ab!"),
    ],
)
def test_schema_semantics(x, index, params, expected):
    assert apply_schema(x, index, params).payload == expected


@pytest.mark.parametrize("t", [ValueType.LIST_INT, ValueType.ARRAY_NAT, ValueType.LIST_CHAR])
@pytest.mark.parametrize("index", [1, 3])
def test_index_schemas_are_identity_on_empty(t, index):
    empty = Value(t, [])
    assert apply_schema(empty, index, ()) == empty


def test_schema_counts():
    counts = {t: schema_count(t) for t in ValueType}
    assert counts[ValueType.INT] == counts[ValueType.NAT] == 2
    assert counts[ValueType.STRING] == 3
    assert all(counts[t] == 4 for t in ValueType if t.is_sequence and t is not ValueType.STRING)


def test_alphabets():
    assert len(SIGMA_CHAR) == 37 and " " in SIGMA_CHAR
    assert set(SIGMA_SP) == set('!?#@ \n\t"\\')


def _seed_value(t, rng):
    if t is ValueType.INT:
        return Value(t, rng.randint(-20, 20))
    if t is ValueType.NAT:
        return Value(t, rng.randint(0, 20))
    if t is ValueType.STRING:
        return Value(t, "".join(rng.choice(SIGMA_CHAR) for _ in range(rng.randint(0, 5))))
    if t is ValueType.LIST_CHAR:
        return Value(t, [rng.choice(SIGMA_CHAR) for _ in range(rng.randint(0, 5))])
    lo = 0 if t.is_nat_family else -9
    return Value(t, [rng.randint(lo, 9) for _ in range(rng.randint(0, 5))])


@given(st.sampled_from(list(ValueType)), st.integers(0, 2**32), st.floats(0, 1))
@settings(max_examples=200)
def test_type_preservation_and_domain(t, seed, prob):
    rng = random.Random(seed)
    x = _seed_value(t, rng)
    pool = IngredientPool({t: (_seed_value(t, rng),)})
    y = x
    for _ in range(10):
        y = mutate_value(y, pool, MutationConfig(ingredient_prob=prob), rng)
        assert y.type is t
        if t.is_nat_family:
            vals = [y.payload] if t.is_scalar else list(y.payload)
            assert all(v >= 0 for v in vals)
        if t is ValueType.STRING:
            assert set(y.payload) <= set(SIGMA_CHAR) | set(SIGMA_SP)


@pytest.mark.parametrize("t", list(ValueType))
def test_schema_frequencies_uniform(t):
    rng = random.Random(11)
    n = 8000
    seen = Counter(mutate_value_traced(_seed_value(t, rng), IngredientPool(), NO_REUSE, rng).schema for _ in range(n))
    k = schema_count(t)
    p = 1 / k
    sigma = math.sqrt(n * p * (1 - p))
    assert set(seen) <= set(range(1, k + 1))
    for i in range(1, k + 1):
        assert abs(seen[i] - n * p) <= 3 * sigma


def test_reuse_only_from_matching_bucket():
    rng = random.Random(0)
    cfg = MutationConfig(ingredient_prob=1.0)
    donor = Value(ValueType.INT, 999)
    pool = IngredientPool({ValueType.INT: (donor,)})
    assert mutate_value(Value(ValueType.INT, 1), pool, cfg, rng) == donor
    # no bucket for Nat: falls back to a schema
    m = mutate_value_traced(Value(ValueType.NAT, 1), pool, cfg, rng)
    assert m.schema in (1, 2)


def test_mutate_input_changes_only_declared_params():
    m = InputMap(a=Value(ValueType.NAT, 5), b=Value(ValueType.NAT, 2))
    rng = random.Random(3)
    for _ in range(50):
        out = mutate_input(m, IngredientPool(), NO_REUSE, rng)
        assert list(out) == ["a", "b"]


def test_expand_is_deterministic_and_new_only():
    seeds = [InputMap(xs=Value(ValueType.LIST_INT, [3, 1, 2])), InputMap(xs=Value(ValueType.LIST_INT, []))]
    cfg = MutationConfig()
    a = expand_candidates(seeds, cfg, derive_rng(42, "t", "mutation"))
    b = expand_candidates(seeds, cfg, derive_rng(42, "t", "mutation"))
    assert a == b
    assert not set(a) & set(seeds)
    assert len(a) == len(set(a)) <= 2 * cfg.max_mutations_per_input
    assert expand_candidates(seeds, cfg, derive_rng(43, "t", "mutation")) != a


def test_expand_rejects_empty():
    with pytest.raises(EmptySeedSet):
        expand_candidates([], MutationConfig())


def test_pool_buckets_by_type():
    m = InputMap(a=Value(ValueType.NAT, 5), xs=Value(ValueType.LIST_INT, [1]))
    pool = build_ingredient_pool([m])
    assert pool.bucket(ValueType.NAT) == (Value(ValueType.NAT, 5),)
    assert pool.bucket(ValueType.STRING) == ()


def test_config_validation():
    with pytest.raises(ValueError):
        MutationConfig(ingredient_prob=1.5)
    with pytest.raises(ValueError):
        MutationConfig(multi_step_size=0)
