import json
import sys
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from veriscale.backend import (
    BuiltinEvaluator,
    HttpBackend,
    ProbeResult,
    SubprocessBackend,
    check_command,
    decide_command,
    handle_request,
    plausible_script,
    render_app,
    split_application,
)
from veriscale.errors import BackendUnavailable
from veriscale.values import Value, ValueType

PRE = "def binaryToDecimal_precond (digits : List Nat) : Prop :=\n  digits.all (fun d => d = 0 ∨ d = 1)"
EXPR = "binaryToDecimal_precond ([1, 2, 1])"


def test_probe_text_forms():
    assert render_app("binaryToDecimal_precond", [Value(ValueType.LIST_NAT, [1, 2, 1])]) == EXPR
    assert check_command(EXPR) == "#check binaryToDecimal_precond ([1, 2, 1])"
    assert decide_command(EXPR) == "#guard decide (binaryToDecimal_precond ([1, 2, 1]))"
    assert decide_command(EXPR, True) == "#guard decide (¬ binaryToDecimal_precond ([1, 2, 1]))"
    assert plausible_script("binaryToDecimal_precond", EXPR, True) == (
        "example: ¬ binaryToDecimal_precond ([1, 2, 1]) := by\n"
        "  unfold binaryToDecimal_precond\n  simp_all!\n  plausible"
    )


def test_split_application_respects_quotes():
    assert split_application('f ("a)b") (#[1, 2])') == ("f", ['"a)b"', "#[1, 2]"])


def test_builtin_probes():
    b = BuiltinEvaluator()
    assert b.check_syntax(check_command(EXPR), PRE) is ProbeResult.PASS
    assert b.check_syntax("#check nosuch ([1])", PRE) is ProbeResult.FAIL
    assert b.check_syntax("#check binaryToDecimal_precond ([1]) ([2])", PRE) is ProbeResult.FAIL
    assert b.guard_decide(decide_command(EXPR), PRE) is ProbeResult.FAIL
    assert b.guard_decide(decide_command(EXPR, True), PRE) is ProbeResult.PASS
    goal = plausible_script("binaryToDecimal_precond", EXPR)
    assert b.plausible_probe(goal, False, PRE) is ProbeResult.COUNTEREXAMPLE
    assert b.plausible_probe(plausible_script("binaryToDecimal_precond", EXPR, True), True, PRE) is ProbeResult.PASS


def _requests():
    return [
        {"probe": "check", "expr": check_command(EXPR), "negated": False, "timeout_ms": 1000, "context": PRE},
        {"probe": "decide", "expr": decide_command(EXPR, True), "negated": True, "timeout_ms": 1000, "context": PRE},
    ]


def test_handle_request():
    b = BuiltinEvaluator()
    assert [handle_request(b, r)["result"] for r in _requests()] == ["pass", "pass"]
    assert handle_request(b, {"probe": "nope"})["result"] == "fail"


def test_subprocess_transport():
    backend = SubprocessBackend([sys.executable, "-m", "veriscale.backend"], timeout_s=10)
    try:
        assert backend.check_syntax(check_command(EXPR), PRE) is ProbeResult.PASS
        assert backend.guard_decide(decide_command(EXPR), PRE) is ProbeResult.FAIL
        assert backend.guard_decide(decide_command(EXPR, True), PRE) is ProbeResult.PASS
    finally:
        backend.close()


def test_subprocess_timeout_restarts():
    sleeper = [sys.executable, "-c", "import sys, time\nfor line in sys.stdin: time.sleep(5)"]
    backend = SubprocessBackend(sleeper, timeout_s=0.2)
    assert backend.guard_decide(decide_command(EXPR), PRE) is ProbeResult.TIMEOUT
    assert backend._proc is None


def test_subprocess_unavailable():
    with pytest.raises(BackendUnavailable):
        SubprocessBackend(["/nonexistent/backend"]).check_syntax("#check x")


@pytest.fixture
def http_backend():
    evaluator = BuiltinEvaluator()

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            req = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
            body = json.dumps(handle_request(evaluator, req)).encode()
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, *args):
            pass

    server = HTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield HttpBackend(f"http://127.0.0.1:{server.server_address[1]}/probe", timeout_s=5)
    server.shutdown()


def test_http_transport(http_backend):
    assert http_backend.check_syntax(check_command(EXPR), PRE) is ProbeResult.PASS
    goal = plausible_script("binaryToDecimal_precond", EXPR)
    assert http_backend.plausible_probe(goal, False, PRE) is ProbeResult.COUNTEREXAMPLE


def test_http_unavailable():
    with pytest.raises(BackendUnavailable):
        HttpBackend("http://127.0.0.1:9/probe", timeout_s=1).check_syntax("#check x")
