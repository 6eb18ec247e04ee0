"""End-to-end expansion and reduction of task suites.

Per task: seeds -> mutation -> classification -> expected pairs ->
adversarial harvest -> plus suite -> reduced lite suite. Tasks run
independently, optionally across worker processes.
"""

from __future__ import annotations

import importlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from .adversarial import synthesize, harvest_unexpected_outputs, write_provenance
from .backend import BuiltinEvaluator, HttpBackend, SubprocessBackend, VerifierBackend
from .classifier import classify_all, complete_expected_pairs
from .errors import ConfigError
from .executor import BuiltinExecutor, RuntimeFailure
from .llm import client_from_config
from .mutation import MutationConfig, dedupe, derive_rng, expand_candidates
from .reduction import (
    ReductionConfig,
    ReductionReport,
    build_kill_matrix,
    co_filter_outputs,
    reduce_expected_pairs,
    reduce_unexpected_inputs,
)
from .seeds import SeedGenConfig, generate_seeds
from .stats import compute_stats
from .suite import Task, TestSuite, atomic_write_text, dumps, load_tasks, task_to_json, task_from_json

log = logging.getLogger(__name__)

# keys whose canonical spelling in the hyperparameter table is upper case
_UPPER_KEYS = {
    "MAX_REJECT_INPUTS_PER_TASK": "max_reject_inputs_per_task",
    "KEEP_PER_CRITICAL_BUCKET": "keep_per_critical_bucket",
    "MAX_ACCEPT_TEST_CASES_PER_TASK": "max_accept_test_cases_per_task",
}


@dataclass
class PipelineConfig:
    rounds: int = 1
    candidates_per_round: int = 40
    example_limit: int = 5
    max_mutations_per_input: int = 15
    mutation_multi_step_size: int = 5
    mutation_ingredient_prob: float = 0.3
    max_adver_impl: int = 5
    max_reject_inputs_per_task: int = 50
    keep_per_critical_bucket: int = 1
    max_accept_test_cases_per_task: int = 50
    rng_seed: int = 0
    workers: int = 1
    exec_timeout_s: float = 2.0
    backend_timeout_s: float = 10.0
    # {"kind": "builtin"} | {"kind": "subprocess", "command": [...]} | {"kind": "http", "url": ...}
    backend: dict = field(default_factory=lambda: {"kind": "builtin"})
    # LLM profile for seeds, decomposition and red teaming; see llm.client_from_config
    llm: dict | None = None
    # one profile per specification model, each with an extra "label"
    spec_models: list = field(default_factory=list)
    # "module:attribute" naming a dict of reference implementations
    references: str = "veriscale.toy:REFERENCES"
    mock: bool = False

    def __post_init__(self):
        for name in (
            "rounds", "candidates_per_round", "example_limit", "max_mutations_per_input",
            "mutation_multi_step_size", "max_adver_impl", "max_reject_inputs_per_task",
            "keep_per_critical_bucket", "max_accept_test_cases_per_task", "workers",
        ):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < (0 if name == "rounds" else 1):
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if not 0.0 <= float(self.mutation_ingredient_prob) <= 1.0:
            raise ConfigError("mutation_ingredient_prob must lie in [0, 1]")

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in doc.items():
            name = _UPPER_KEYS.get(key, key)
            if name not in known:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[name] = value
        try:
            return cls(**kwargs)
        except TypeError as e:
            raise ConfigError(str(e)) from None

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {path} is not valid JSON: {e}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(doc)

    def override(self, **changes) -> "PipelineConfig":
        doc = asdict(self)
        doc.update({k: v for k, v in changes.items() if v is not None})
        return PipelineConfig(**doc)

    def seed_config(self) -> SeedGenConfig:
        return SeedGenConfig(self.rounds, self.candidates_per_round, self.example_limit)

    def mutation_config(self) -> MutationConfig:
        return MutationConfig(
            self.max_mutations_per_input, self.mutation_multi_step_size,
            self.mutation_ingredient_prob, self.rng_seed,
        )

    def reduction_config(self) -> ReductionConfig:
        return ReductionConfig(
            self.max_reject_inputs_per_task, self.keep_per_critical_bucket,
            self.max_accept_test_cases_per_task,
        )


def load_references(spec: str) -> dict:
    module, _, attr = spec.partition(":")
    try:
        return dict(getattr(importlib.import_module(module), attr or "REFERENCES"))
    except (ImportError, AttributeError) as e:
        raise ConfigError(f"cannot load references {spec!r}: {e}") from None


def make_backend(cfg: PipelineConfig) -> VerifierBackend:
    kind = cfg.backend.get("kind", "builtin")
    if kind == "builtin":
        return BuiltinEvaluator()
    if kind == "subprocess":
        return SubprocessBackend(cfg.backend["command"], cfg.backend_timeout_s)
    if kind == "http":
        return HttpBackend(cfg.backend["url"], cfg.backend_timeout_s)
    raise ConfigError(f"unknown backend kind {kind!r}")


def make_clients(task: Task, cfg: PipelineConfig, tasks_dir: Path | None):
    if cfg.mock:
        from .toy import TASKS_DIR, mock_clients

        return mock_clients(task, cfg.seed_config(), tasks_dir or TASKS_DIR)
    if not cfg.llm:
        raise ConfigError("no llm profile configured (use --mock for scripted responses)")
    generator = client_from_config(cfg.llm)
    spec_clients = [(p.get("label", f"model{k}"), client_from_config(p)) for k, p in enumerate(cfg.spec_models, 1)]
    return generator, generator, spec_clients


@dataclass
class TaskOutput:
    task_id: str
    base: TestSuite
    plus: TestSuite
    lite: TestSuite
    provenance: str
    report: dict


def base_suite(task: Task, executor) -> TestSuite:
    """The task's own hand-written cases, with reference outputs filled in."""
    pairs = []
    for m in task.base_expected_inputs:
        try:
            pairs.append((m, executor.run(task.impl_ref, m)))
        except RuntimeFailure as e:
            log.warning("task %s: reference fails on base input %r: %s", task.id, m, e)
    return TestSuite(pairs, list(task.base_unexpected_inputs), [], task.id)


def run_task(task: Task, cfg: PipelineConfig, tasks_dir: Path | None = None, executor=None, backend=None) -> TaskOutput:
    executor = executor or BuiltinExecutor(load_references(cfg.references), cfg.exec_timeout_s)
    backend = backend or make_backend(cfg)
    seed_client, generator, spec_clients = make_clients(task, cfg, tasks_dir)

    seeds = generate_seeds(task, seed_client, cfg.seed_config())
    mutants = expand_candidates(seeds, cfg.mutation_config(), derive_rng(cfg.rng_seed, task.id, "mutation"))
    candidates = dedupe([*seeds, *mutants])
    part = classify_all(candidates, task, backend, workers=1)
    pairs = complete_expected_pairs(part.expected, task, executor)

    adv = synthesize(task, generator, spec_clients, executor, backend, cfg.max_adver_impl)
    specs_by_id = {s.id: s for s in adv.specs}
    records = harvest_unexpected_outputs(adv.impls, pairs, specs_by_id, executor, backend)
    plus = TestSuite(pairs, list(part.unexpected), [(r.input, r.adversarial_output) for r in records], task.id)

    rcfg = cfg.reduction_config()
    report = ReductionReport()
    lite_unexpected = reduce_unexpected_inputs(part.unexpected, rcfg, task.signature, report)
    matrix = build_kill_matrix(pairs, adv.impls, executor)
    lite_pairs = reduce_expected_pairs(pairs, matrix, rcfg, report)
    lite = TestSuite(lite_pairs, lite_unexpected, co_filter_outputs(plus.unexpected_outputs, lite_pairs), task.id)

    stage_counts: dict[str, int] = {}
    for v in part.verdicts:
        key = f"{v.value.value}@{v.stage.value}"
        stage_counts[key] = stage_counts.get(key, 0) + 1
    task_report = {
        "task_id": task.id,
        "seeds": len(seeds),
        "mutants": len(mutants),
        "candidates": len(candidates),
        "classification": dict(sorted(stage_counts.items())),
        "dropped_unknown": part.dropped,
        "specs": [s.id for s in adv.specs],
        "adversarial_impls": len(adv.impls),
        "used_fallback": adv.used_fallback,
        "harvested_outputs": len(records),
        "plus_counts": list(plus.counts()),
        "lite_counts": list(lite.counts()),
        "reduction": report.to_json(),
    }
    return TaskOutput(task.id, base_suite(task, executor), plus, lite, write_provenance(adv.impls, adv.specs), task_report)


def _run_task_worker(task_doc: dict, cfg_doc: dict, tasks_dir: str | None) -> TaskOutput:
    logging.getLogger().setLevel(logging.WARNING)
    return run_task(task_from_json(task_doc), PipelineConfig(**cfg_doc), Path(tasks_dir) if tasks_dir else None)


def write_outputs(result: TaskOutput, out_dir: Path) -> None:
    atomic_write_text(out_dir / "base" / f"{result.task_id}.json", dumps(result.base.to_json()))
    atomic_write_text(out_dir / "plus" / f"{result.task_id}.json", dumps(result.plus.to_json()))
    atomic_write_text(out_dir / "lite" / f"{result.task_id}.json", dumps(result.lite.to_json()))
    atomic_write_text(out_dir / "provenance" / f"{result.task_id}.jsonl", result.provenance)
    atomic_write_text(out_dir / "reports" / f"{result.task_id}.json", dumps(result.report))


def run_pipeline(tasks_dir, out_dir, cfg: PipelineConfig) -> dict:
    """Run every task in ``tasks_dir``; writes suites, provenance and reports under ``out_dir``."""
    tasks_dir, out_dir = Path(tasks_dir), Path(out_dir)
    tasks = load_tasks(tasks_dir)
    if not tasks:
        raise ConfigError(f"no task files in {tasks_dir}")
    started = time.perf_counter()
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, len(tasks))) as pool:
            futures = [
                pool.submit(_run_task_worker, task_to_json(t), asdict(cfg), str(tasks_dir)) for t in tasks
            ]
            results = [f.result() for f in futures]
    else:
        results = [run_task(t, cfg, tasks_dir) for t in tasks]
    for r in results:
        write_outputs(r, out_dir)

    base = [r.base for r in results]
    summary = {
        "tasks": [r.task_id for r in results],
        "rng_seed": cfg.rng_seed,
        "base": compute_stats(base, name="base").to_json(),
        "plus": compute_stats([r.plus for r in results], base, name="plus").to_json(),
        "lite": compute_stats([r.lite for r in results], base, name="lite").to_json(),
    }
    atomic_write_text(out_dir / "summary.json", dumps(summary))
    log.info("pipeline: %d tasks in %.2fs", len(results), time.perf_counter() - started)
    return summary
