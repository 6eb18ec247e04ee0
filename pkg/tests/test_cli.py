import json
import subprocess
import sys

import pytest

from veriscale.cli import main
from veriscale.toy import TASKS_DIR

TASK = str(TASKS_DIR / "insertionSort.task.json")


def run(*argv):
    return main(list(argv))


def test_unknown_flag_is_usage_error(capsys):
    assert run("pipeline", "--bogus") == 1
    assert run() == 1
    assert run("stats", "--suites", "x", "--json", "--nope") == 1
    err = capsys.readouterr().err.strip().splitlines()[-1]
    assert json.loads(err)["exit_code"] == 1


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "cfg.json"
    bad.write_text("{not json")
    assert run("pipeline", "--mock", "--config", str(bad), "--out", str(tmp_path / "o"), "--json") == 2
    assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"


def test_backend_failure_exit_code(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"backend": {"kind": "subprocess", "command": ["/nonexistent/lean"]}}))
    cands = tmp_path / "c.json"
    cands.write_text('[{"xs": [1]}]')
    assert run("classify", "--task", TASK, "--candidates", str(cands), "--config", str(cfg)) == 3


def test_stage_commands_chain(tmp_path, capsys):
    out = tmp_path / "pipe"
    assert run("pipeline", "--mock", "--seed", "5", "--out", str(out)) == 0
    cands = tmp_path / "cands.json"
    assert run("expand", "--task", TASK, "--seed", "5", "--out", str(cands)) == 0
    assert json.loads(cands.read_text())
    suite = tmp_path / "classified.json"
    assert run("classify", "--task", TASK, "--candidates", str(cands), "--out", str(suite)) == 0
    harvested = tmp_path / "harvested.json"
    prov = str(out / "provenance" / "insertionSort.jsonl")
    assert run("harvest", "--task", TASK, "--suite", str(suite), "--provenance", prov, "--out", str(harvested)) == 0
    assert json.loads(harvested.read_text())["unexpected_outputs"]
    lite = tmp_path / "lite.json"
    assert run("reduce", "--task", TASK, "--suite", str(harvested), "--provenance", prov, "--out", str(lite),
               "--report", str(tmp_path / "r.json"), "--MAX_ACCEPT_TEST_CASES_PER_TASK", "5") == 0
    assert len(json.loads(lite.read_text())["expected_pairs"]) <= 5
    capsys.readouterr()
    assert run("eval", "--task", TASK, "--suite", str(harvested), "--impl", "insertionSort", "--ground-truth") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["code"]["code_score"] == 1.0
    assert (doc["spec"]["spec_lower"], doc["spec"]["spec_upper"]) == (1.0, 1.0)


def test_stats_report_and_figure(tmp_path, capsys):
    out = tmp_path / "pipe"
    assert run("pipeline", "--mock", "--out", str(out)) == 0
    capsys.readouterr()
    fig = tmp_path / "fig" / "volumes.png"
    assert run("stats", "--suites", str(out / "plus"), "--baseline", str(out / "base"),
               "--out", str(tmp_path / "stats.json"), "--figure", str(fig)) == 0
    table = capsys.readouterr().out
    assert "Expected Input-Output" in table and "plus" in table
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    rows = json.loads((tmp_path / "stats.json").read_text())["rows"]
    assert rows[1]["categories"]["expected_pairs"]["multiplier"] > 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "veriscale", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "0.1.0"
