"""Adversarial synthesis of unexpected outputs.

Candidate specifications are generated from a problem decomposition, a red
team writes degenerate implementations that game each specification, and
every implementation is run on the expected inputs. An output is harvested
when it differs from the reference output yet the implementation's own
generating postcondition still accepts it.
"""

from __future__ import annotations

import enum
import json
import logging
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .backend import ProbeResult, VerifierBackend, strip_outer_parens
from .classifier import decide_predicate
from .errors import ClientError, CompileError, NoBlocksFound, NotConjunctive
from .executor import Executor, RuntimeFailure
from .lean_lite import parse_defs, split_conjuncts
from .llm import LlmClient
from .prompts import render_adversarial_prompt, render_decomposition_prompt, render_spec_prompt
from .suite import Pair, Task
from .values import InputMap, Value, value_key

log = logging.getLogger(__name__)

MAX_ADVER_IMPL = 5


class Origin(enum.Enum):
    RED_TEAM = "RedTeam"
    FALLBACK_DROP = "FallbackDrop"


@dataclass(frozen=True)
class CandidateSpec:
    id: str
    source_model: str
    precond_text: str
    postcond_text: str
    precond_ref: str
    postcond_ref: str

    @property
    def text(self) -> str:
        return f"{self.precond_text}\n\n{self.postcond_text}".strip()

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "source_model": self.source_model,
            "precond_ref": self.precond_ref,
            "postcond_ref": self.postcond_ref,
            "precond_text": self.precond_text,
            "postcond_text": self.postcond_text,
        }

    @classmethod
    def from_json(cls, d: dict) -> "CandidateSpec":
        return cls(**{k: d[k] for k in ("id", "source_model", "precond_text", "postcond_text", "precond_ref", "postcond_ref")})


@dataclass(frozen=True)
class AdversarialImpl:
    id: str
    source_spec: str
    body_ref: str
    origin: Origin
    source_text: str

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "origin": self.origin.value,
            "source_spec": self.source_spec,
            "source_text": self.source_text,
        }


@dataclass(frozen=True)
class HarvestRecord:
    input: InputMap
    adversarial_output: Value
    reference_output: Value
    accepting_spec: str
    impl_id: str = ""


def ground_truth_spec(task: Task) -> CandidateSpec:
    return CandidateSpec(
        id=f"{task.id}/ground-truth",
        source_model="ground-truth",
        precond_text=task.precond_text,
        postcond_text=task.postcond_text,
        precond_ref=task.precond_ref,
        postcond_ref=task.postcond_ref,
    )


def spec_compiles(spec: CandidateSpec, backend: VerifierBackend) -> bool:
    return all(
        backend.check_syntax(f"#check {name}", spec.text) is ProbeResult.PASS
        for name in (spec.precond_ref, spec.postcond_ref)
    )


# ---------------------------------------------------------------------------
# response parsing

_FENCE = re.compile(r"```(?:lean4?|Lean)?[ \t]*\n(.*?)```", re.S)


def _code(text: str) -> str:
    blocks = _FENCE.findall(text)
    return "\n".join(blocks) if blocks else text


def _last_def_name(source: str) -> str:
    return parse_defs(source)[-1].name


def parse_spec_response(text: str, task: Task, spec_id: str, source_model: str) -> CandidateSpec:
    code = _code(text)
    m = re.search(r"--\s*Precondition Implementation\s*\n(.*?)--\s*Postcondition Implementation\s*\n(.*)", code, re.S)
    if not m:
        raise CompileError("spec response lacks the precondition/postcondition sections")
    pre, post = m.group(1).strip(), m.group(2).strip()
    return CandidateSpec(
        id=spec_id,
        source_model=source_model,
        precond_text=pre,
        postcond_text=post,
        precond_ref=_last_def_name(pre),
        postcond_ref=_last_def_name(post),
    )


_MARKER = re.compile(r"^[ \t]*--[ \t]*Adversarial Implementation[ \t]+(\d+)[ \t]*$", re.M)


def parse_adversarial_blocks(text: str, limit: int = MAX_ADVER_IMPL) -> list[str]:
    """Source blocks delimited by the numbered ``-- Adversarial Implementation i`` markers."""
    code = _code(text)
    marks = list(_MARKER.finditer(code))
    if not marks:
        raise NoBlocksFound("no '-- Adversarial Implementation i' markers in response")
    blocks = []
    for k, m in enumerate(marks):
        end = marks[k + 1].start() if k + 1 < len(marks) else len(code)
        body = code[m.end():end].strip()
        if body:
            blocks.append(body)
    if not blocks:
        raise NoBlocksFound("all implementation blocks are empty")
    return blocks[:limit]


def compile_impls(
    blocks: Sequence[str],
    spec: CandidateSpec,
    executor: Executor,
    origin: Origin,
    task: Task | None = None,
) -> list[AdversarialImpl]:
    impls = []
    for i, src in enumerate(blocks, start=1):
        try:
            handles = executor.compile(src)
        except CompileError as e:
            log.info("adversarial block %d for %s dropped: %s", i, spec.id, e)
            continue
        name = list(handles)[-1]
        if task is not None and not name.startswith(task.impl_ref):
            log.info("adversarial block %d for %s: unexpected name %s", i, spec.id, name)
        impls.append(AdversarialImpl(f"{spec.id}/{name}", spec.id, handles[name], origin, src))
    return impls


def parse_adversarial_response(
    text: str, spec: CandidateSpec, executor: Executor, origin: Origin = Origin.RED_TEAM, task: Task | None = None
) -> list[AdversarialImpl]:
    return compile_impls(parse_adversarial_blocks(text), spec, executor, origin, task)


# ---------------------------------------------------------------------------
# constraint-dropping fallback

_DEF_SPLIT = re.compile(r"(def\s+[A-Za-z_][A-Za-z0-9_'!?.]*.*?:=)", re.S)


def fallback_drop_constraints(spec: CandidateSpec, backend: VerifierBackend | None = None) -> list[CandidateSpec]:
    """Leave-one-out weakenings of a conjunctive postcondition."""
    pieces = _DEF_SPLIT.split(spec.postcond_text)
    # pieces: [prefix, head1, body1, head2, body2, ...]; the postcondition is the last def
    if len(pieces) < 3:
        raise NotConjunctive(f"cannot find the postcondition definition in {spec.id}")
    prefix = "".join(pieces[:-2])
    head, body = pieces[-2], pieces[-1]
    clauses = split_conjuncts(re.sub(r"--[^\n]*", "", body))
    if len(clauses) < 2:
        raise NotConjunctive(f"postcondition of {spec.id} has a single clause")
    out = []
    for k in range(len(clauses)):
        kept = [_guard_clause(c) for j, c in enumerate(clauses) if j != k]
        weakened = CandidateSpec(
            id=f"{spec.id}/drop{k + 1}",
            source_model="fallback-drop",
            precond_text=spec.precond_text,
            postcond_text=f"{prefix}{head}\n  " + " ∧ ".join(kept),
            precond_ref=spec.precond_ref,
            postcond_ref=spec.postcond_ref,
        )
        if backend is not None and not spec_compiles(weakened, backend):
            log.info("weakened spec %s does not compile, skipped", weakened.id)
            continue
        out.append(weakened)
    return out


def _guard_clause(clause: str) -> str:
    if strip_outer_parens(clause) != clause.strip():
        return clause  # already wrapped
    if "∨" in clause or clause.lstrip().startswith(("∀", "∃", "fun", "¬")) or "→" in clause:
        return f"({clause})"
    return clause


# ---------------------------------------------------------------------------
# orchestration


@dataclass
class AdversarialResult:
    decomposition: str = ""
    specs: list[CandidateSpec] = field(default_factory=list)
    impls: list[AdversarialImpl] = field(default_factory=list)
    used_fallback: bool = False


def red_team(
    task: Task, spec: CandidateSpec, client: LlmClient, executor: Executor, origin: Origin, cap: int = MAX_ADVER_IMPL
) -> list[AdversarialImpl]:
    system, user = render_adversarial_prompt(task, spec)
    text = client.complete(system, user)
    try:
        return parse_adversarial_response(text, spec, executor, origin, task)[:cap]
    except NoBlocksFound:
        log.info("red team produced no implementation blocks for %s", spec.id)
        return []


def synthesize(
    task: Task,
    generator: LlmClient,
    spec_clients: Sequence[tuple[str, LlmClient]],
    executor: Executor,
    backend: VerifierBackend,
    max_impls: int = MAX_ADVER_IMPL,
) -> AdversarialResult:
    res = AdversarialResult()
    system, user = render_decomposition_prompt(task)
    res.decomposition = generator.complete(system, user)
    system, user = render_spec_prompt(task, res.decomposition)
    for k, (label, client) in enumerate(spec_clients):
        try:
            spec = parse_spec_response(client.complete(system, user), task, f"{task.id}/spec{k + 1}", label)
        except (ClientError, CompileError) as e:
            log.warning("task %s: spec from %s unusable: %s", task.id, label, e)
            continue
        if not spec_compiles(spec, backend):
            log.info("task %s: spec from %s does not compile", task.id, label)
            continue
        res.specs.append(spec)
        try:
            res.impls.extend(red_team(task, spec, generator, executor, Origin.RED_TEAM, max_impls))
        except ClientError as e:
            log.warning("task %s: red team failed on %s: %s", task.id, spec.id, e)
    if not res.impls:
        res.used_fallback = True
        try:
            weakened = fallback_drop_constraints(ground_truth_spec(task), backend)
        except NotConjunctive as e:
            log.info("task %s: fallback unavailable: %s", task.id, e)
            weakened = []
        for spec in weakened:
            res.specs.append(spec)
            try:
                res.impls.extend(red_team(task, spec, generator, executor, Origin.FALLBACK_DROP, max_impls))
            except ClientError as e:
                log.warning("task %s: red team failed on %s: %s", task.id, spec.id, e)
    return res


def harvest_unexpected_outputs(
    impls: Iterable[AdversarialImpl],
    expected_pairs: Sequence[Pair],
    specs: dict[str, CandidateSpec],
    executor: Executor,
    backend: VerifierBackend,
) -> list[HarvestRecord]:
    records: list[HarvestRecord] = []
    seen: set[str] = set()
    for impl in impls:
        spec = specs[impl.source_spec]
        for m, ref_out in expected_pairs:
            try:
                out = executor.run(impl.body_ref, m)
            except RuntimeFailure:
                continue
            if out == ref_out:
                continue
            key = m.key + "|" + value_key(out)
            if key in seen:
                continue
            args = list(m.values()) + [out]
            if decide_predicate(spec.postcond_ref, args, backend, spec.text).holds is not True:
                continue
            seen.add(key)
            records.append(HarvestRecord(m, out, ref_out, spec.id, impl.id))
    return records


def write_provenance(impls: Iterable[AdversarialImpl], specs: Iterable[CandidateSpec]) -> str:
    """JSONL: one line per spec (``kind: spec``) then one per implementation."""
    lines = [json.dumps({"kind": "spec", **s.to_json()}, ensure_ascii=False) for s in specs]
    lines += [json.dumps(i.to_json(), ensure_ascii=False) for i in impls]
    return "\n".join(lines) + ("\n" if lines else "")


def read_provenance(text: str, executor: Executor) -> tuple[list[CandidateSpec], list[AdversarialImpl]]:
    specs, impls = [], []
    for line in text.splitlines():
        if not line.strip():
            continue
        d = json.loads(line)
        if d.get("kind") == "spec":
            specs.append(CandidateSpec.from_json(d))
            continue
        handles = executor.compile(d["source_text"])
        name = list(handles)[-1]
        impls.append(AdversarialImpl(d["id"], d["source_spec"], handles[name], Origin(d["origin"]), d["source_text"]))
    return specs, impls
