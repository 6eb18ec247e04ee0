"""Command-line interface.

Exit status: 0 success, 1 usage error, 2 configuration or input error,
3 backend, executor or client failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .adversarial import ground_truth_spec, harvest_unexpected_outputs, read_provenance
from .backend import BuiltinEvaluator, serve
from .classifier import classify_all, complete_expected_pairs
from .errors import (
    BackendInconsistency,
    BackendUnavailable,
    ClientError,
    ConfigError,
    ExecutorUnavailable,
    VeriScaleError,
)
from .executor import BuiltinExecutor
from .mutation import derive_rng, expand_candidates
from .pipeline import PipelineConfig, load_references, make_backend, run_pipeline
from .reduction import ReductionReport, build_kill_matrix, co_filter_outputs, reduce_expected_pairs, reduce_unexpected_inputs
from .scoring import aggregate, evaluate_code, evaluate_spec
from .stats import compute_stats, render_table, render_tsv
from .suite import TestSuite, atomic_write_text, dumps, load_suite, load_task
from .values import InputMap

log = logging.getLogger("veriscale")

EXIT_USAGE, EXIT_CONFIG, EXIT_BACKEND = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from None


def _write(path, doc) -> None:
    text = dumps(doc)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        atomic_write_text(path, text)


def _config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config) if getattr(args, "config", None) else PipelineConfig()
    overrides = {}
    for name in (
        "rounds", "candidates_per_round", "example_limit", "max_mutations_per_input",
        "mutation_multi_step_size", "mutation_ingredient_prob", "max_adver_impl",
        "max_reject_inputs_per_task", "keep_per_critical_bucket", "max_accept_test_cases_per_task",
        "workers", "references",
    ):
        overrides[name] = getattr(args, name, None)
    overrides["rng_seed"] = getattr(args, "seed", None)
    if getattr(args, "mock", False):
        overrides["mock"] = True
    return cfg.override(**overrides)


def _inputs(doc, task) -> list[InputMap]:
    """A JSON array of bindings, tagged ``{"type", "value"}`` or plain payloads."""
    if not isinstance(doc, list):
        raise ConfigError("expected a JSON array of inputs")
    out = []
    for item in doc:
        if isinstance(item, dict) and set(item) == {"input"}:
            item = item["input"]
        tagged = isinstance(item, dict) and all(isinstance(v, dict) and "type" in v for v in item.values())
        out.append(InputMap.from_json(item, task.signature) if tagged else InputMap.from_payloads(item, task.signature))
    return out


def _executor(cfg: PipelineConfig) -> BuiltinExecutor:
    return BuiltinExecutor(load_references(cfg.references), cfg.exec_timeout_s)


# ---------------------------------------------------------------------------
# subcommands


def cmd_expand(args) -> int:
    cfg = _config(args)
    task = load_task(args.task)
    seeds = _inputs(_read_json(args.seeds), task) if args.seeds else [*task.base_expected_inputs, *task.base_unexpected_inputs]
    out = expand_candidates(seeds, cfg.mutation_config(), derive_rng(cfg.rng_seed, task.id, "mutation"))
    _write(args.out, [m.to_json() for m in out])
    log.info("expand: %d seeds -> %d new candidates", len(seeds), len(out))
    return 0


def cmd_classify(args) -> int:
    cfg = _config(args)
    task = load_task(args.task)
    candidates = _inputs(_read_json(args.candidates), task)
    part = classify_all(candidates, task, make_backend(cfg), workers=cfg.workers)
    suite = TestSuite(complete_expected_pairs(part.expected, task, _executor(cfg)), part.unexpected, [], task.id)
    _write(args.out, suite.to_json())
    log.info("classify: %d expected, %d unexpected, %d unknown", len(part.expected), len(part.unexpected), part.dropped)
    return 0


def cmd_harvest(args) -> int:
    cfg = _config(args)
    task = load_task(args.task)
    suite = load_suite(args.suite)
    executor = _executor(cfg)
    specs, impls = read_provenance(Path(args.provenance).read_text(encoding="utf-8"), executor)
    records = harvest_unexpected_outputs(impls, suite.expected_pairs, {s.id: s for s in specs}, executor, make_backend(cfg))
    suite.unexpected_outputs = [(r.input, r.adversarial_output) for r in records]
    suite.task_id = suite.task_id or task.id
    _write(args.out, suite.to_json())
    log.info("harvest: %d unexpected outputs from %d implementations", len(records), len(impls))
    return 0


def cmd_reduce(args) -> int:
    cfg = _config(args)
    task = load_task(args.task)
    suite = load_suite(args.suite)
    executor = _executor(cfg)
    impls = []
    if args.provenance:
        _, impls = read_provenance(Path(args.provenance).read_text(encoding="utf-8"), executor)
    rcfg = cfg.reduction_config()
    report = ReductionReport()
    unexpected = reduce_unexpected_inputs(suite.unexpected_inputs, rcfg, task.signature, report)
    pairs = reduce_expected_pairs(suite.expected_pairs, build_kill_matrix(suite.expected_pairs, impls, executor), rcfg, report)
    lite = TestSuite(pairs, unexpected, co_filter_outputs(suite.unexpected_outputs, pairs), suite.task_id or task.id)
    _write(args.out, lite.to_json())
    if args.report:
        _write(args.report, report.to_json())
    return 0


def _suite_files(directory) -> list[Path]:
    paths = sorted(Path(directory).glob("*.json"))
    if not paths:
        raise ConfigError(f"no suite files in {directory}")
    return paths


def cmd_stats(args) -> int:
    suites = [load_suite(p) for p in _suite_files(args.suites)]
    baseline = [load_suite(p) for p in _suite_files(args.baseline)] if args.baseline else None
    rows = []
    if baseline is not None:
        rows.append(compute_stats(baseline, name=args.baseline_name or Path(args.baseline).name))
    rows.append(compute_stats(suites, baseline, name=args.name or Path(args.suites).name))
    sys.stdout.write(render_tsv(rows) if args.tsv else render_table(rows))
    if args.out:
        _write(args.out, {"rows": [r.to_json() for r in rows]})
    if args.figure:
        from .plotting import plot_volumes

        plot_volumes(rows, args.figure)
    return 0


def cmd_eval(args) -> int:
    cfg = _config(args)
    task = load_task(args.task)
    suite = load_suite(args.suite)
    doc: dict = {"task_id": task.id}
    if args.impl or args.impl_source:
        executor = _executor(cfg)
        ref = args.impl or task.impl_ref
        if args.impl_source:
            handles = executor.compile(Path(args.impl_source).read_text(encoding="utf-8"))
            ref = handles.get(args.impl or task.impl_ref) or list(handles.values())[-1]
        doc["code"] = evaluate_code(ref, suite, executor).to_json(args.transcript)
    if args.spec_source or args.ground_truth:
        if args.spec_source:
            context = Path(args.spec_source).read_text(encoding="utf-8")
        else:
            context = ground_truth_spec(task).text
        pre = args.precond_ref or task.precond_ref
        post = args.postcond_ref or task.postcond_ref
        doc["spec"] = aggregate([evaluate_spec(pre, post, suite, make_backend(cfg), context)]).to_json(args.transcript)
    if len(doc) == 1:
        raise UsageError("eval: give --impl/--impl-source and/or --spec-source/--ground-truth")
    _write(args.out, doc)
    return 0


def cmd_pipeline(args) -> int:
    cfg = _config(args)
    if args.tasks is None:
        from .toy import TASKS_DIR

        args.tasks = TASKS_DIR
    summary = run_pipeline(args.tasks, args.out, cfg)
    from .stats import SuiteStats, CategoryStats

    rows = []
    for key in ("base", "plus", "lite"):
        d = summary[key]
        rows.append(SuiteStats(d["name"], d["n_suites"], {
            c: CategoryStats(v["mean"], v["min"], v["max"], v.get("multiplier")) for c, v in d["categories"].items()
        }))
    sys.stdout.write(render_table(rows))
    return 0


def cmd_serve_backend(args) -> int:
    serve(BuiltinEvaluator())
    return 0


# ---------------------------------------------------------------------------
# parser


def _table3_flags(p: argparse.ArgumentParser, groups: set[str]) -> None:
    g = p.add_argument_group("hyperparameters (override the config file)")
    if "seeds" in groups:
        g.add_argument("--rounds", type=int)
        g.add_argument("--candidates-per-round", type=int)
        g.add_argument("--example-limit", type=int)
    if "mutation" in groups:
        g.add_argument("--max-mutations-per-input", type=int)
        g.add_argument("--mutation-multi-step-size", type=int)
        g.add_argument("--mutation-ingredient-prob", type=float)
    if "adversarial" in groups:
        g.add_argument("--max-adver-impl", type=int)
    if "reduction" in groups:
        g.add_argument("--MAX_REJECT_INPUTS_PER_TASK", "--max-reject-inputs-per-task", dest="max_reject_inputs_per_task", type=int)
        g.add_argument("--KEEP_PER_CRITICAL_BUCKET", "--keep-per-critical-bucket", dest="keep_per_critical_bucket", type=int)
        g.add_argument("--MAX_ACCEPT_TEST_CASES_PER_TASK", "--max-accept-test-cases-per-task", dest="max_accept_test_cases_per_task", type=int)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file (keys as in PipelineConfig)")
    common.add_argument("--json", action="store_true", help="machine-readable errors on stderr")
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("--references", help="module:attribute holding reference implementations")

    parser = _Parser(prog="veriscale", description="Expand, classify, reduce and score verification test suites.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("expand", parents=[common], help="mutate seed inputs into new candidates")
    p.add_argument("--task", required=True)
    p.add_argument("--seeds", help="JSON array of inputs (default: the task's base inputs)")
    p.add_argument("--seed", type=int, help="rng seed")
    p.add_argument("--out", default="-")
    _table3_flags(p, {"mutation"})
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("classify", parents=[common], help="split candidates into expected and unexpected inputs")
    p.add_argument("--task", required=True)
    p.add_argument("--candidates", required=True)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("harvest", parents=[common], help="collect unexpected outputs from adversarial implementations")
    p.add_argument("--task", required=True)
    p.add_argument("--suite", required=True)
    p.add_argument("--provenance", required=True, help="JSONL of specs and implementations")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_harvest)

    p = sub.add_parser("reduce", parents=[common], help="shrink a suite to the lite budget")
    p.add_argument("--task", required=True)
    p.add_argument("--suite", required=True)
    p.add_argument("--provenance")
    p.add_argument("--out", default="-")
    p.add_argument("--report")
    _table3_flags(p, {"reduction"})
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("stats", parents=[common], help="suite volume table")
    p.add_argument("--suites", required=True, help="directory of suite files")
    p.add_argument("--baseline", help="directory of baseline suite files")
    p.add_argument("--name")
    p.add_argument("--baseline-name")
    p.add_argument("--tsv", action="store_true", help="tab-separated instead of an aligned table")
    p.add_argument("--out", help="JSON report path")
    p.add_argument("--figure", help="PNG bar chart path")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("eval", parents=[common], help="score an implementation and/or a specification on a suite")
    p.add_argument("--task", required=True)
    p.add_argument("--suite", required=True)
    p.add_argument("--impl", help="reference name or compiled definition name")
    p.add_argument("--impl-source", help="Lean source of the implementation")
    p.add_argument("--spec-source", help="Lean source with precondition and postcondition")
    p.add_argument("--ground-truth", action="store_true", help="score the task's own specification")
    p.add_argument("--precond-ref")
    p.add_argument("--postcond-ref")
    p.add_argument("--transcript", action="store_true")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pipeline", parents=[common], help="run every stage on a task directory")
    p.add_argument("--tasks", help="task directory (default: bundled toy tasks)")
    p.add_argument("--out", default="out")
    p.add_argument("--mock", action="store_true", help="scripted LLM responses from <id>.mock.json")
    p.add_argument("--seed", type=int, help="rng seed")
    p.add_argument("--workers", type=int)
    _table3_flags(p, {"seeds", "mutation", "adversarial", "reduction"})
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("serve-backend", parents=[common], help="serve the builtin evaluator over stdin/stdout")
    p.set_defaults(func=cmd_serve_backend)
    return parser


def _exit_code(e: BaseException) -> int:
    if isinstance(e, UsageError):
        return EXIT_USAGE
    if isinstance(e, (BackendUnavailable, BackendInconsistency, ExecutorUnavailable, ClientError)):
        return EXIT_BACKEND
    return EXIT_CONFIG


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    want_json = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        return args.func(args)
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    except (UsageError, VeriScaleError, OSError) as e:
        code = _exit_code(e)
        if want_json:
            sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e), "exit_code": code}) + "\n")
        else:
            sys.stderr.write(f"error: {e}\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
