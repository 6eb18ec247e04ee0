"""Verifier backends: probe rendering, the builtin evaluator and wire transports.

A backend answers three kinds of probe, each carried as the literal command
text a Lean toolchain would run:

* ``#check <expr>``                         -> pass | fail
* ``#guard decide <expr>`` (or ``(¬ <expr>)``) -> pass | fail | timeout
* an ``example ... := by unfold; simp_all!; plausible`` script
                                             -> counterexample | pass | timeout

Definitions the probe refers to travel in ``context`` (source text), so each
probe is self-contained.

Wire protocol (one JSON object per line, request then response)::

    {"probe": "check"|"decide"|"plausible", "expr"|"goal": str,
     "negated": bool, "timeout_ms": int, "context": str}
    {"result": "pass"|"fail"|"counterexample"|"timeout", "detail": str}
"""

from __future__ import annotations

import enum
import functools
import json
import logging
import re
import selectors
import subprocess
import sys
import threading
import urllib.error
import urllib.request
from typing import IO, Protocol, Sequence

from .errors import BackendUnavailable, CompileError, ValueSyntaxError, TypeMismatch
from .lean_lite import EvalError, Program
from .values import Value, parse_value, render_value

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT_S = 10.0


class ProbeResult(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    COUNTEREXAMPLE = "counterexample"
    TIMEOUT = "timeout"


# ---------------------------------------------------------------------------
# probe text


def render_app(name: str, args: Sequence[Value]) -> str:
    return " ".join([name, *(f"({render_value(v, 'prover')})" for v in args)])


def check_command(expr: str) -> str:
    return f"#check {expr}"


def decide_command(expr: str, negated: bool = False) -> str:
    return f"#guard decide (¬ {expr})" if negated else f"#guard decide ({expr})"


def plausible_script(name: str, expr: str, negated: bool = False) -> str:
    neg = "¬ " if negated else ""
    return f"example: {neg}{expr} := by\n  unfold {name}\n  simp_all!\n  plausible"


class VerifierBackend(Protocol):
    parallelism: int

    def check_syntax(self, expr: str, context: str = "") -> ProbeResult: ...

    def guard_decide(self, expr: str, context: str = "") -> ProbeResult: ...

    def plausible_probe(self, goal: str, negated: bool, context: str = "") -> ProbeResult: ...


# ---------------------------------------------------------------------------
# builtin evaluator


def split_application(text: str) -> tuple[str, list[str]]:
    """``name (a) (b)`` -> ``("name", ["a", "b"])``; arguments must be parenthesised."""
    text = text.strip()
    m = re.match(r"[A-Za-z_][A-Za-z0-9_'!?.]*", text)
    if not m:
        raise ValueSyntaxError(f"expected an application, got {text!r}")
    name, rest = m.group(0), text[m.end():]
    args: list[str] = []
    i = 0
    while i < len(rest):
        c = rest[i]
        if c.isspace():
            i += 1
            continue
        if c != "(":
            raise ValueSyntaxError(f"argument {len(args) + 1} of {name} is not parenthesised")
        depth, j, quote = 0, i, ""
        while j < len(rest):
            d = rest[j]
            if quote:
                if d == "\\":
                    j += 2
                    continue
                if d == quote:
                    quote = ""
            elif d in "\"'":
                quote = d
            elif d in "([":
                depth += 1
            elif d in ")]":
                depth -= 1
                if depth == 0:
                    break
            j += 1
        if j >= len(rest):
            raise ValueSyntaxError(f"unbalanced parentheses in {text!r}")
        args.append(rest[i + 1:j])
        i = j + 1
    return name, args


def strip_outer_parens(text: str) -> str:
    text = text.strip()
    while text.startswith("(") and text.endswith(")"):
        depth = 0
        for i, c in enumerate(text):
            depth += c == "("
            depth -= c == ")"
            if depth == 0 and i < len(text) - 1:
                return text
        text = text[1:-1].strip()
    return text


class BuiltinEvaluator:
    """Decides probes by direct evaluation of the definitions in ``context``.

    ``base_context`` is prepended to every probe's context (useful when all
    probes share the same ground-truth definitions). Never returns TIMEOUT.
    """

    parallelism = 4

    def __init__(self, base_context: str = ""):
        self.base_context = base_context

    @functools.lru_cache(maxsize=256)
    def _program(self, context: str) -> Program:
        source = "\n\n".join(s for s in (self.base_context, context) if s.strip())
        return Program.compile(source) if source.strip() else Program()

    def _typed_app(self, prog: Program, expr: str) -> tuple[str, list]:
        name, arg_texts = split_application(expr)
        d = prog.defs.get(name)
        if d is None:
            raise CompileError(f"unknown identifier {name!r}")
        if len(arg_texts) != d.arity:
            raise CompileError(f"{name} expects {d.arity} arguments, got {len(arg_texts)}")
        args = []
        for text, vtype in zip(arg_texts, d.param_types()):
            v = parse_value(text, vtype)
            args.append(list(v.payload) if isinstance(v.payload, tuple) else v.payload)
        return name, args

    def _prop(self, prog: Program, prop: str) -> bool:
        prop = strip_outer_parens(prop)
        negated = prop.startswith("¬")
        app = prop[1:].strip() if negated else prop
        name, args = self._typed_app(prog, strip_outer_parens(app))
        if not prog.defs[name].is_prop:
            raise CompileError(f"{name} is not a proposition")
        holds = bool(prog.call(name, args))
        return not holds if negated else holds

    def check_syntax(self, expr: str, context: str = "") -> ProbeResult:
        body = expr[len("#check"):] if expr.startswith("#check") else expr
        try:
            prog = self._program(context)
            body = body.strip()
            if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_'!?.]*", body):
                return ProbeResult.PASS if body in prog.defs else ProbeResult.FAIL
            self._typed_app(prog, body)
        except (CompileError, ValueSyntaxError, TypeMismatch) as e:
            log.debug("check failed: %s", e)
            return ProbeResult.FAIL
        return ProbeResult.PASS

    def guard_decide(self, expr: str, context: str = "") -> ProbeResult:
        body = expr[len("#guard decide"):] if expr.startswith("#guard decide") else expr
        try:
            holds = self._prop(self._program(context), body)
        except (CompileError, ValueSyntaxError, TypeMismatch, EvalError) as e:
            log.debug("decide failed: %s", e)
            return ProbeResult.FAIL
        return ProbeResult.PASS if holds else ProbeResult.FAIL

    def plausible_probe(self, goal: str, negated: bool, context: str = "") -> ProbeResult:
        m = re.search(r"example\s*:\s*(.*?)\s*:=\s*by\b", goal, re.S)
        if not m:
            return ProbeResult.FAIL
        try:
            holds = self._prop(self._program(context), " ".join(m.group(1).split()))
        except (CompileError, ValueSyntaxError, TypeMismatch, EvalError) as e:
            log.debug("plausible failed: %s", e)
            return ProbeResult.FAIL
        return ProbeResult.PASS if holds else ProbeResult.COUNTEREXAMPLE

    # executor-side helper: a compiled program for spec/impl sources
    def program(self, context: str) -> Program:
        return self._program(context)


# ---------------------------------------------------------------------------
# wire transports


def _request(probe: str, text: str, negated: bool, context: str, timeout_s: float) -> dict:
    req = {"probe": probe, "negated": negated, "timeout_ms": int(timeout_s * 1000), "context": context}
    req["goal" if probe == "plausible" else "expr"] = text
    return req


def _parse_response(resp: dict) -> ProbeResult:
    try:
        return ProbeResult(resp["result"])
    except (KeyError, ValueError, TypeError):
        raise BackendUnavailable(f"malformed backend response {resp!r}") from None


class _WireBackend:
    parallelism = 1

    def __init__(self, timeout_s: float = DEFAULT_TIMEOUT_S):
        self.timeout_s = timeout_s

    def _send(self, req: dict) -> dict:
        raise NotImplementedError

    def check_syntax(self, expr: str, context: str = "") -> ProbeResult:
        return _parse_response(self._send(_request("check", expr, False, context, self.timeout_s)))

    def guard_decide(self, expr: str, context: str = "") -> ProbeResult:
        negated = "(¬" in expr
        return _parse_response(self._send(_request("decide", expr, negated, context, self.timeout_s)))

    def plausible_probe(self, goal: str, negated: bool, context: str = "") -> ProbeResult:
        return _parse_response(self._send(_request("plausible", goal, negated, context, self.timeout_s)))


class SubprocessBackend(_WireBackend):
    """Talks NDJSON to a persistent subprocess; restarts it after a timeout."""

    def __init__(self, command: Sequence[str], timeout_s: float = DEFAULT_TIMEOUT_S):
        super().__init__(timeout_s)
        self.command = list(command)
        self._proc: subprocess.Popen | None = None
        self._lock = threading.Lock()

    def _start(self) -> subprocess.Popen:
        try:
            return subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as e:
            raise BackendUnavailable(f"cannot start backend {self.command}: {e}") from None

    def _send(self, req: dict) -> dict:
        with self._lock:
            if self._proc is None or self._proc.poll() is not None:
                self._proc = self._start()
            proc = self._proc
            try:
                proc.stdin.write(json.dumps(req, ensure_ascii=False) + "\n")
                proc.stdin.flush()
            except (BrokenPipeError, OSError) as e:
                self._proc = None
                raise BackendUnavailable(f"backend pipe closed: {e}") from None
            sel = selectors.DefaultSelector()
            sel.register(proc.stdout, selectors.EVENT_READ)
            ready = sel.select(timeout=self.timeout_s + 1.0)
            sel.close()
            if not ready:
                proc.kill()
                self._proc = None
                return {"result": "timeout", "detail": "no response within probe timeout"}
            line = proc.stdout.readline()
            if not line:
                self._proc = None
                raise BackendUnavailable("backend exited")
            try:
                return json.loads(line)
            except json.JSONDecodeError:
                raise BackendUnavailable(f"malformed backend line {line!r}") from None

    def close(self) -> None:
        with self._lock:
            if self._proc is not None:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
                self._proc = None


class HttpBackend(_WireBackend):
    """POSTs each probe request as JSON to ``url``."""

    def __init__(self, url: str, timeout_s: float = DEFAULT_TIMEOUT_S):
        super().__init__(timeout_s)
        self.url = url

    def _send(self, req: dict) -> dict:
        data = json.dumps(req, ensure_ascii=False).encode("utf-8")
        request = urllib.request.Request(
            self.url, data=data, headers={"Content-Type": "application/json"}, method="POST"
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout_s + 1.0) as resp:
                return json.loads(resp.read().decode("utf-8"))
        except TimeoutError:
            return {"result": "timeout", "detail": "http timeout"}
        except (urllib.error.URLError, OSError, json.JSONDecodeError) as e:
            raise BackendUnavailable(f"backend at {self.url} unavailable: {e}") from None


def handle_request(backend: VerifierBackend, req: dict) -> dict:
    """Server-side dispatch of one wire request."""
    probe = req.get("probe")
    context = req.get("context", "")
    if probe == "check":
        res = backend.check_syntax(req["expr"], context)
    elif probe == "decide":
        res = backend.guard_decide(req["expr"], context)
    elif probe == "plausible":
        res = backend.plausible_probe(req["goal"], bool(req.get("negated")), context)
    else:
        return {"result": "fail", "detail": f"unknown probe {probe!r}"}
    return {"result": res.value, "detail": ""}


def serve(backend: VerifierBackend, inp: IO[str] = sys.stdin, out: IO[str] = sys.stdout) -> None:
    for line in inp:
        if not line.strip():
            continue
        try:
            resp = handle_request(backend, json.loads(line))
        except (json.JSONDecodeError, KeyError) as e:
            resp = {"result": "fail", "detail": f"bad request: {e}"}
        out.write(json.dumps(resp) + "\n")
        out.flush()


if __name__ == "__main__":
    serve(BuiltinEvaluator())
