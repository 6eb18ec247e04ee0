"""Suite reduction.

Unexpected inputs: boundary-preserving bucket selection over structural
signatures. Expected pairs: greedy set cover over the adversary kill matrix,
then a kill-count-ordered fill up to the budget.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field

from .executor import Executor, RuntimeFailure
from .suite import Pair
from .values import InputMap, ParamSignature

log = logging.getLogger(__name__)

CRITICAL_FLAGS = ("has_empty_container", "has_zero", "has_negative", "mismatched_lengths")


@dataclass(frozen=True)
class ReductionConfig:
    max_unexpected_inputs: int = 50
    keep_per_critical_bucket: int = 1
    max_expected_pairs: int = 50

    def __post_init__(self):
        if min(self.max_unexpected_inputs, self.keep_per_critical_bucket, self.max_expected_pairs) < 1:
            raise ValueError("reduction budgets must be >= 1")


@dataclass(frozen=True)
class StructuralSignature:
    has_empty_container: bool = False
    has_zero: bool = False
    has_negative: bool = False
    mismatched_lengths: bool | None = None  # None with fewer than two sequence params
    sorted_ascending: bool = False
    sorted_descending: bool = False
    has_duplicates: bool = False
    all_equal: bool = False
    length_class: str | None = None  # "0" | "1" | "2-5" | "6+"; None without sequences

    @property
    def critical(self) -> tuple[str, ...]:
        return tuple(f for f in CRITICAL_FLAGS if getattr(self, f))


def _length_class(n: int) -> str:
    if n <= 1:
        return str(n)
    return "2-5" if n <= 5 else "6+"


def signature_of(inputs: InputMap, signature: ParamSignature | None = None) -> StructuralSignature:
    names = signature.names if signature is not None else tuple(inputs)
    values = [inputs[n] for n in names]
    seqs = [v for v in values if v.type.is_sequence]
    numbers = [v.payload for v in values if v.type.is_scalar]
    for v in seqs:
        if v.type.is_int_sequence:
            numbers.extend(v.payload)
    elems = [tuple(v.payload) for v in seqs]
    ordered = [e for e in elems if len(e) >= 2]
    return StructuralSignature(
        has_empty_container=any(len(e) == 0 for e in elems),
        has_zero=any(z == 0 for z in numbers),
        has_negative=any(z < 0 for z in numbers),
        mismatched_lengths=(len({len(e) for e in elems}) > 1) if len(elems) >= 2 else None,
        sorted_ascending=bool(ordered) and all(all(a <= b for a, b in zip(e, e[1:])) for e in ordered),
        sorted_descending=bool(ordered) and all(all(a >= b for a, b in zip(e, e[1:])) for e in ordered),
        has_duplicates=any(len(set(e)) < len(e) for e in elems),
        all_equal=bool(ordered) and any(len(set(e)) == 1 for e in ordered),
        length_class=_length_class(max(len(e) for e in elems)) if elems else None,
    )


@dataclass
class ReductionReport:
    critical_buckets: dict = field(default_factory=dict)
    retained_per_bucket: dict = field(default_factory=dict)
    cover_size: int = 0
    fill_size: int = 0
    kill_counts: list = field(default_factory=list)
    unexpected_before: int = 0
    unexpected_after: int = 0
    expected_before: int = 0
    expected_after: int = 0

    def to_json(self) -> dict:
        return asdict(self)


def reduce_unexpected_inputs(
    inputs: Sequence[InputMap],
    cfg: ReductionConfig,
    signature: ParamSignature | None = None,
    report: ReductionReport | None = None,
) -> list[InputMap]:
    """Select at most ``cfg.max_unexpected_inputs`` inputs, keeping boundary buckets.

    The result keeps the original input order.
    """
    report = report if report is not None else ReductionReport()
    cap = cfg.max_unexpected_inputs
    n = len(inputs)
    sigs = [signature_of(m, signature) for m in inputs]
    # deterministic priority order: canonical rendering, then position
    priority = sorted(range(n), key=lambda i: (inputs[i].key, i))
    rank = {i: r for r, i in enumerate(priority)}

    critical: dict[str, list[int]] = {f: [] for f in CRITICAL_FLAGS}
    for i in priority:
        for f in sigs[i].critical:
            critical[f].append(i)
    report.critical_buckets = {f: len(v) for f, v in critical.items()}
    report.unexpected_before = n

    if n <= cap:
        chosen = set(range(n))
    else:
        chosen: set[int] = set()
        nonempty = [f for f in CRITICAL_FLAGS if critical[f]]
        # step 1: critical buckets
        wanted = sum(min(cfg.keep_per_critical_bucket, len(critical[f])) for f in nonempty)
        if wanted > cap:
            # one per bucket, buckets ordered by their best representative
            for f in sorted(nonempty, key=lambda f: rank[critical[f][0]]):
                if len(chosen) >= cap:
                    break
                if not any(i in chosen for i in critical[f]):
                    chosen.add(critical[f][0])
        else:
            for f in nonempty:
                have = sum(1 for i in critical[f] if i in chosen)
                for i in critical[f]:
                    if have >= cfg.keep_per_critical_bucket:
                        break
                    if i not in chosen:
                        chosen.add(i)
                        have += 1
        # step 2: round-robin over the non-critical structural buckets
        buckets: dict[StructuralSignature, list[int]] = defaultdict(list)
        for i in priority:
            if not sigs[i].critical:
                buckets[sigs[i]].append(i)
        queues = sorted(buckets.values(), key=lambda b: rank[b[0]])
        depth = 0
        while len(chosen) < cap and any(depth < len(q) for q in queues):
            for q in queues:
                if len(chosen) >= cap:
                    break
                if depth < len(q):
                    chosen.add(q[depth])
            depth += 1
        # step 3: priority-order fallback
        for i in priority:
            if len(chosen) >= cap:
                break
            chosen.add(i)

    report.retained_per_bucket = {f: sum(1 for i in critical[f] if i in chosen) for f in CRITICAL_FLAGS}
    report.unexpected_after = len(chosen)
    return [inputs[i] for i in sorted(chosen)]


# ---------------------------------------------------------------------------
# adversary-killing reduction


@dataclass
class KillMatrix:
    rows: int
    cols: list[str]  # implementation ids
    cells: list[list[bool]]

    def kills(self, row: int) -> set[int]:
        return {j for j, c in enumerate(self.cells[row]) if c}

    def killed_by(self, rows: Sequence[int]) -> set[int]:
        out: set[int] = set()
        for r in rows:
            out |= self.kills(r)
        return out

    def row_counts(self) -> list[int]:
        return [sum(row) for row in self.cells]


def build_kill_matrix(pairs: Sequence[Pair], impls: Sequence, executor: Executor) -> KillMatrix:
    """``impls`` are AdversarialImpl-like objects with ``id`` and ``body_ref``."""
    memo: dict[tuple[str, str], object] = {}
    cells = []
    for m, expected in pairs:
        row = []
        for impl in impls:
            key = (impl.body_ref, m.key)
            if key not in memo:
                try:
                    memo[key] = executor.run(impl.body_ref, m)
                except RuntimeFailure:
                    memo[key] = None
            out = memo[key]
            row.append(out is None or out != expected)
        cells.append(row)
    return KillMatrix(len(pairs), [i.id for i in impls], cells)


def greedy_cover(matrix: KillMatrix) -> list[int]:
    """Rows covering every killable column, most new kills first (ties: lowest row)."""
    row_kills = [matrix.kills(r) for r in range(matrix.rows)]
    remaining = set().union(*row_kills) if row_kills else set()
    cover = []
    while remaining:
        best, gain = -1, 0
        for r, ks in enumerate(row_kills):
            g = len(ks & remaining)
            if g > gain:
                best, gain = r, g
        cover.append(best)
        remaining -= row_kills[best]
    return cover


def reduce_expected_pairs(
    pairs: Sequence[Pair],
    matrix: KillMatrix,
    cfg: ReductionConfig,
    report: ReductionReport | None = None,
) -> list[Pair]:
    if matrix.rows != len(pairs):
        raise ValueError("kill matrix rows do not align with pairs")
    report = report if report is not None else ReductionReport()
    cover = greedy_cover(matrix)
    chosen = set(cover)
    counts = matrix.row_counts()
    fill = 0
    for r in sorted(range(len(pairs)), key=lambda r: (-counts[r], r)):
        if len(chosen) >= cfg.max_expected_pairs:
            break
        if r not in chosen:
            chosen.add(r)
            fill += 1
    report.cover_size = len(cover)
    report.fill_size = fill
    report.kill_counts = counts
    report.expected_before = len(pairs)
    report.expected_after = len(chosen)
    return [pairs[r] for r in sorted(chosen)]


def co_filter_outputs(unexpected_outputs: Sequence[Pair], kept_pairs: Sequence[Pair]) -> list[Pair]:
    """Keep unexpected outputs whose input survived expected-pair reduction."""
    kept = {m.key for m, _ in kept_pairs}
    return [(m, v) for m, v in unexpected_outputs if m.key in kept]
