"""Suite-based scoring of implementations and specifications.

A specification is probed four ways: its precondition must hold on every
expected input and fail on every unexpected input, and its postcondition must
hold on every expected pair and fail on every unexpected output. Unknown
probe outcomes are counted as violations for the lower bound and as satisfied
for the upper bound.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

from .backend import ProbeResult, VerifierBackend, check_command
from .classifier import VerdictValue, decide_predicate
from .errors import BackendInconsistency, ExecutorUnavailable
from .executor import Executor, RuntimeFailure
from .suite import TestSuite

log = logging.getLogger(__name__)


class Outcome(enum.Enum):
    HOLDS = "Holds"
    FAILS_AS_REQUIRED = "FailsAsRequired"
    VIOLATION = "Violation"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class CaseRecord:
    probe: str  # pre_expected | pre_unexpected | post_expected | post_unexpected | code
    index: int
    outcome: Outcome
    detail: str = ""


@dataclass
class EvalResult:
    code_score: float | None = None
    spec_lower: float | None = None
    spec_upper: float | None = None
    transcript: list[CaseRecord] = field(default_factory=list)
    probe_fractions: dict[str, float] = field(default_factory=dict)

    def counts(self) -> dict[str, int]:
        out = {o.value: 0 for o in Outcome}
        for rec in self.transcript:
            out[rec.outcome.value] += 1
        return out

    def to_json(self, with_transcript: bool = False) -> dict:
        doc = {
            "code_score": self.code_score,
            "spec_lower": self.spec_lower,
            "spec_upper": self.spec_upper,
            "outcomes": self.counts(),
            "probe_fractions": self.probe_fractions,
        }
        if with_transcript:
            doc["transcript"] = [
                {"probe": r.probe, "index": r.index, "outcome": r.outcome.value, "detail": r.detail}
                for r in self.transcript
            ]
        return doc


def evaluate_code(impl_ref: str, suite: TestSuite, executor: Executor | None) -> EvalResult:
    if executor is None:
        raise ExecutorUnavailable("no executor configured")
    if not suite.expected_pairs:
        raise ValueError("code scoring needs at least one expected pair")
    res = EvalResult()
    passed = 0
    for i, (m, expected) in enumerate(suite.expected_pairs):
        try:
            got = executor.run(impl_ref, m)
        except RuntimeFailure as e:
            res.transcript.append(CaseRecord("code", i, Outcome.VIOLATION, str(e)))
            continue
        if got == expected:
            passed += 1
            res.transcript.append(CaseRecord("code", i, Outcome.HOLDS))
        else:
            res.transcript.append(CaseRecord("code", i, Outcome.VIOLATION, repr(got)))
    res.code_score = passed / len(suite.expected_pairs)
    return res


def _outcome(holds: bool | None, must_hold: bool) -> Outcome:
    if holds is None:
        return Outcome.UNKNOWN
    if holds == must_hold:
        return Outcome.HOLDS if must_hold else Outcome.FAILS_AS_REQUIRED
    return Outcome.VIOLATION


def _probe(name, args, must_hold, backend, context) -> tuple[Outcome, str]:
    try:
        verdict = decide_predicate(name, args, backend, context)
    except BackendInconsistency as e:
        log.warning("inconsistent backend answer, counted as unknown: %s", e)
        return Outcome.UNKNOWN, str(e)
    if verdict.value is VerdictValue.UNKNOWN:
        return Outcome.UNKNOWN, verdict.stage.value
    return _outcome(verdict.holds, must_hold), verdict.stage.value


def evaluate_spec(
    precond_ref: str,
    postcond_ref: str,
    suite: TestSuite,
    backend: VerifierBackend,
    context: str = "",
) -> EvalResult:
    """Score one specification on one task's suite (per-task pass/fail per bound)."""
    if not any(suite.counts()):
        raise ValueError("spec scoring needs a suite with at least one case")
    res = EvalResult()
    defined = all(
        backend.check_syntax(check_command(n), context) is ProbeResult.PASS
        for n in (precond_ref, postcond_ref)
    )
    plan = [
        ("pre_expected", precond_ref, [list(m.values()) for m, _ in suite.expected_pairs], True),
        ("pre_unexpected", precond_ref, [list(m.values()) for m in suite.unexpected_inputs], False),
        ("post_expected", postcond_ref, [[*m.values(), v] for m, v in suite.expected_pairs], True),
        ("post_unexpected", postcond_ref, [[*m.values(), v] for m, v in suite.unexpected_outputs], False),
    ]
    for probe, name, arg_lists, must_hold in plan:
        for i, args in enumerate(arg_lists):
            if not defined:
                outcome, detail = Outcome.VIOLATION, "definition missing"
            else:
                outcome, detail = _probe(name, args, must_hold, backend, context)
            res.transcript.append(CaseRecord(probe, i, outcome, detail))

    violations = sum(r.outcome is Outcome.VIOLATION for r in res.transcript)
    unknowns = sum(r.outcome is Outcome.UNKNOWN for r in res.transcript)
    res.spec_upper = 1.0 if violations == 0 else 0.0
    res.spec_lower = 1.0 if violations == 0 and unknowns == 0 else 0.0
    for probe, *_ in plan:
        recs = [r for r in res.transcript if r.probe == probe]
        if recs:
            ok = sum(r.outcome in (Outcome.HOLDS, Outcome.FAILS_AS_REQUIRED) for r in recs)
            res.probe_fractions[probe] = ok / len(recs)
    return res


def aggregate(results: Sequence[EvalResult]) -> EvalResult:
    """Average per-task scores; fields unset in any input stay unset."""
    if not results:
        raise ValueError("nothing to aggregate")
    out = EvalResult()
    for attr in ("code_score", "spec_lower", "spec_upper"):
        vals = [getattr(r, attr) for r in results]
        if all(v is not None for v in vals):
            setattr(out, attr, sum(vals) / len(vals))
    for r in results:
        out.transcript.extend(r.transcript)
    keys = sorted({k for r in results for k in r.probe_fractions})
    for k in keys:
        vals = [r.probe_fractions[k] for r in results if k in r.probe_fractions]
        out.probe_fractions[k] = sum(vals) / len(vals)
    return out
