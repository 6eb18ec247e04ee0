"""Precondition-guided classification of candidate inputs.

Each candidate goes through a syntax filter, then a bidirectional
``decide`` stage, then (only if still undecided) a bidirectional
``plausible`` stage. Anything left undecided is dropped.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .backend import (
    ProbeResult,
    VerifierBackend,
    check_command,
    decide_command,
    plausible_script,
    render_app,
)
from .errors import BackendInconsistency, BackendUnavailable, ExecutorUnavailable, VeriScaleError
from .executor import Executor, RuntimeFailure
from .suite import Pair, Task
from .values import InputMap, Value

log = logging.getLogger(__name__)


class VerdictValue(enum.Enum):
    EXPECTED = "Expected"
    UNEXPECTED = "Unexpected"
    UNKNOWN = "Unknown"


class Stage(enum.Enum):
    SYNTAX = "Syntax"
    DECIDE = "Decide"
    PLAUSIBLE = "Plausible"


@dataclass(frozen=True)
class ProbeRecord:
    command: str
    result: ProbeResult


@dataclass(frozen=True)
class Verdict:
    value: VerdictValue
    stage: Stage
    transcript: tuple[ProbeRecord, ...] = ()

    @property
    def holds(self) -> bool | None:
        """True / False when decided, None for Unknown."""
        if self.value is VerdictValue.UNKNOWN:
            return None
        return self.value is VerdictValue.EXPECTED


def decide_predicate(
    name: str, args: Sequence[Value], backend: VerifierBackend, context: str = ""
) -> Verdict:
    """Bidirectional decision of ``name args`` (Expected = holds)."""
    expr = render_app(name, args)
    log_ = []

    def probe(command: str, result: ProbeResult) -> ProbeResult:
        log_.append(ProbeRecord(command, result))
        return result

    cmd = check_command(expr)
    if probe(cmd, backend.check_syntax(cmd, context)) is not ProbeResult.PASS:
        return Verdict(VerdictValue.UNKNOWN, Stage.SYNTAX, tuple(log_))

    pos_cmd, neg_cmd = decide_command(expr), decide_command(expr, negated=True)
    pos = probe(pos_cmd, backend.guard_decide(pos_cmd, context))
    neg = probe(neg_cmd, backend.guard_decide(neg_cmd, context))
    if pos is ProbeResult.PASS and neg is ProbeResult.PASS:
        raise BackendInconsistency(f"both polarities of {expr} pass decide")
    if pos is ProbeResult.PASS:
        return Verdict(VerdictValue.EXPECTED, Stage.DECIDE, tuple(log_))
    if neg is ProbeResult.PASS:
        return Verdict(VerdictValue.UNEXPECTED, Stage.DECIDE, tuple(log_))

    pos_goal = plausible_script(name, expr)
    neg_goal = plausible_script(name, expr, negated=True)
    pos_p = probe(pos_goal, backend.plausible_probe(pos_goal, False, context))
    neg_p = probe(neg_goal, backend.plausible_probe(neg_goal, True, context))
    pos_cex = pos_p is ProbeResult.COUNTEREXAMPLE
    neg_cex = neg_p is ProbeResult.COUNTEREXAMPLE
    if pos_cex and neg_cex:
        raise BackendInconsistency(f"counterexamples found for both polarities of {expr}")
    if neg_cex:
        return Verdict(VerdictValue.EXPECTED, Stage.PLAUSIBLE, tuple(log_))
    if pos_cex:
        return Verdict(VerdictValue.UNEXPECTED, Stage.PLAUSIBLE, tuple(log_))
    return Verdict(VerdictValue.UNKNOWN, Stage.PLAUSIBLE, tuple(log_))


def classify(inputs: InputMap, task: Task, backend: VerifierBackend) -> Verdict:
    args = [inputs[n] for n in task.signature.names]
    return decide_predicate(task.precond_ref, args, backend, task.spec_text)


class ClassificationErrors(VeriScaleError):
    def __init__(self, failures: list[tuple[InputMap, Exception]]):
        lines = [f"{m!r}: {type(e).__name__}: {e}" for m, e in failures[:5]]
        more = f" (+{len(failures) - 5} more)" if len(failures) > 5 else ""
        super().__init__(f"{len(failures)} classification failures: " + "; ".join(lines) + more)
        self.failures = failures


@dataclass
class Partition:
    expected: list[InputMap] = field(default_factory=list)
    unexpected: list[InputMap] = field(default_factory=list)
    dropped: int = 0
    verdicts: list[Verdict] = field(default_factory=list)


def classify_all(
    candidates: Sequence[InputMap], task: Task, backend: VerifierBackend, workers: int = 1
) -> Partition:
    workers = max(1, min(workers, getattr(backend, "parallelism", 1)))

    def one(m):
        try:
            return classify(m, task, backend), None
        except BackendUnavailable:
            raise
        except VeriScaleError as e:
            return None, e

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, candidates))
    else:
        results = [one(m) for m in candidates]

    failures = [(m, err) for m, (_, err) in zip(candidates, results) if err is not None]
    if failures:
        raise ClassificationErrors(failures)
    part = Partition()
    for m, (verdict, _) in zip(candidates, results):
        part.verdicts.append(verdict)
        if verdict.value is VerdictValue.EXPECTED:
            part.expected.append(m)
        elif verdict.value is VerdictValue.UNEXPECTED:
            part.unexpected.append(m)
        else:
            part.dropped += 1
    return part


def complete_expected_pairs(
    expected_inputs: Sequence[InputMap], task: Task, executor: Executor | None
) -> list[Pair]:
    if executor is None:
        raise ExecutorUnavailable("no executor configured")
    pairs = []
    for m in expected_inputs:
        try:
            pairs.append((m, executor.run(task.impl_ref, m)))
        except RuntimeFailure as e:
            log.info("reference failed on %r, excluded: %s", m, e)
    return pairs
