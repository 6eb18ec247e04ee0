"""Type-aware mutation of typed values and input maps.

Every type carries a fixed, ordered list of mutation schemas (1-based
indices). A mutation step picks a schema uniformly, draws its parameters
uniformly from the schema's finite parameter space, and applies it. Schemas
are type-preserving; Nat-family results are clipped at zero.

With probability ``ingredient_prob`` (and a non-empty pool bucket for the
value's type) a step instead reuses a value harvested from the current
candidate set.
"""

from __future__ import annotations

import hashlib
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple

from .errors import EmptySeedSet
from .values import SIGMA_CHAR, SIGMA_SP, InputMap, Value, ValueType

DELTAS = (-2, -1, 0, 1, 2)
APPEND_RANGE = tuple(range(-5, 6))


def clip(z: int) -> int:
    return max(0, z)


@dataclass(frozen=True)
class MutationConfig:
    max_mutations_per_input: int = 15
    multi_step_size: int = 5
    ingredient_prob: float = 0.3
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.ingredient_prob <= 1.0:
            raise ValueError("ingredient_prob must lie in [0, 1]")
        if self.max_mutations_per_input < 1 or self.multi_step_size < 1:
            raise ValueError("mutation counts must be >= 1")


@dataclass(frozen=True)
class IngredientPool:
    by_type: dict = field(default_factory=dict)

    def bucket(self, vtype: ValueType) -> tuple[Value, ...]:
        return self.by_type.get(vtype, ())


class Mutation(NamedTuple):
    schema: int  # 1-based index within the type's schema list; 0 = ingredient reuse
    params: tuple
    value: Value


# ---------------------------------------------------------------------------
# schema definitions: (sampler, apply) per index


def _int_op(i: int, x: int, delta: int) -> int:
    return x + delta if i == 1 else delta * x


def _scalar_schemas(nat: bool):
    post = clip if nat else (lambda z: z)

    def make(i):
        def sample(x, rng):
            return (rng.choice(DELTAS),)

        def apply(x, params):
            (delta,) = params
            return post(_int_op(i, x, delta))

        return sample, apply

    return [make(1), make(2)]


def _seq_schemas(nat: bool):
    post = clip if nat else (lambda z: z)

    def s1_sample(x, rng):
        if not x:
            return ()
        return (rng.randrange(len(x)), rng.choice((1, 2)), rng.choice(DELTAS))

    def s1_apply(x, params):
        if not x:
            return x
        j, i, delta = params
        return x[:j] + (post(_int_op(i, x[j], delta)),) + x[j + 1:]

    def s2_sample(x, rng):
        return (rng.choice(APPEND_RANGE),)

    def s2_apply(x, params):
        (v,) = params
        return x + (post(v),)

    return [(s1_sample, s1_apply), (s2_sample, s2_apply), _deletion(), _reversal()]


def _deletion():
    def sample(x, rng):
        return (rng.randrange(len(x)),) if x else ()

    def apply(x, params):
        if not x:
            return x
        (j,) = params
        return x[:j] + x[j + 1:]

    return sample, apply


def _reversal():
    return (lambda x, rng: ()), (lambda x, params: x[::-1])


def _char_list_schemas():
    def s1_sample(x, rng):
        if not x:
            return ()
        return (rng.randrange(len(x)), rng.choice(SIGMA_CHAR))

    def s1_apply(x, params):
        if not x:
            return x
        j, c = params
        return x[:j] + (c,) + x[j + 1:]

    def s2_sample(x, rng):
        return (rng.choice(SIGMA_CHAR),)

    def s2_apply(x, params):
        return x + (params[0],)

    return [(s1_sample, s1_apply), (s2_sample, s2_apply), _deletion(), _reversal()]


def _string_schemas():
    return [
        ((lambda x, rng: ()), (lambda x, params: "")),
        ((lambda x, rng: ()), (lambda x, params: x[::-1])),
        ((lambda x, rng: (rng.choice(SIGMA_SP),)), (lambda x, params: x + params[0])),
    ]


SCHEMAS: dict[ValueType, list[tuple[Callable, Callable]]] = {
    ValueType.INT: _scalar_schemas(nat=False),
    ValueType.NAT: _scalar_schemas(nat=True),
    ValueType.LIST_INT: _seq_schemas(nat=False),
    ValueType.ARRAY_INT: _seq_schemas(nat=False),
    ValueType.LIST_NAT: _seq_schemas(nat=True),
    ValueType.ARRAY_NAT: _seq_schemas(nat=True),
    ValueType.LIST_CHAR: _char_list_schemas(),
    ValueType.STRING: _string_schemas(),
}


def schema_count(vtype: ValueType) -> int:
    return len(SCHEMAS[vtype])


def apply_schema(x: Value, index: int, params: tuple = ()) -> Value:
    """Apply schema ``index`` (1-based) of ``x``'s type with explicit parameters."""
    _, apply = SCHEMAS[x.type][index - 1]
    return Value(x.type, apply(x.payload, tuple(params)))


def sample_mutation(x: Value, rng: random.Random) -> Mutation:
    """One schema-based mutation step (no ingredient reuse)."""
    schemas = SCHEMAS[x.type]
    index = rng.randrange(len(schemas)) + 1
    sample, apply = schemas[index - 1]
    params = sample(x.payload, rng)
    return Mutation(index, params, Value(x.type, apply(x.payload, params)))


def mutate_value_traced(
    x: Value, pool: IngredientPool, cfg: MutationConfig, rng: random.Random
) -> Mutation:
    bucket = pool.bucket(x.type)
    if bucket and cfg.ingredient_prob > 0 and rng.random() < cfg.ingredient_prob:
        return Mutation(0, (), rng.choice(bucket))
    return sample_mutation(x, rng)


def mutate_value(x: Value, pool: IngredientPool, cfg: MutationConfig, rng: random.Random) -> Value:
    return mutate_value_traced(x, pool, cfg, rng).value


def mutate_input(
    m: InputMap,
    pool: IngredientPool,
    cfg: MutationConfig,
    rng: random.Random,
    steps: int | None = None,
) -> InputMap:
    """Apply ``steps`` single-parameter mutation steps (uniform in 1..multi_step_size by default)."""
    if steps is None:
        steps = rng.randint(1, cfg.multi_step_size)
    names = list(m)
    for _ in range(steps):
        name = rng.choice(names)
        m = m.replace(name, mutate_value(m[name], pool, cfg, rng))
    return m


def build_ingredient_pool(candidates: Iterable[InputMap]) -> IngredientPool:
    by_type: dict[ValueType, list[Value]] = {}
    for m in candidates:
        for v in m.values():
            by_type.setdefault(v.type, []).append(v)
    return IngredientPool({t: tuple(vs) for t, vs in by_type.items()})


def dedupe(inputs: Iterable[InputMap]) -> list[InputMap]:
    seen: set[str] = set()
    out = []
    for m in inputs:
        if m.key not in seen:
            seen.add(m.key)
            out.append(m)
    return out


def derive_rng(seed: int, *labels: Any) -> random.Random:
    """Independent deterministic stream for ``(seed, *labels)``."""
    material = "\x1f".join([str(seed), *map(str, labels)]).encode()
    return random.Random(int.from_bytes(hashlib.sha256(material).digest()[:8], "big"))


def expand_candidates(
    seeds: Sequence[InputMap],
    cfg: MutationConfig,
    rng: random.Random | None = None,
) -> list[InputMap]:
    """Mutate every seed up to ``max_mutations_per_input`` times.

    Returns only new inputs, deduplicated against the seeds and each other.
    Each seed gets its own stream drawn up front from ``rng``, so the result
    does not depend on the order seeds are processed in.
    """
    unique = dedupe(seeds)
    if not unique:
        raise EmptySeedSet("expand_candidates needs at least one seed")
    if rng is None:
        rng = random.Random(cfg.rng_seed)
    pool = build_ingredient_pool(unique)
    streams = [rng.getrandbits(64) for _ in unique]
    seen = {m.key for m in unique}
    out: list[InputMap] = []
    for seed, stream in zip(unique, streams):
        r = random.Random(stream)
        for _ in range(cfg.max_mutations_per_input):
            child = mutate_input(seed, pool, cfg, r)
            if child.key not in seen:
                seen.add(child.key)
                out.append(child)
    return out
