"""Running reference and adversarial implementations on inputs."""

from __future__ import annotations

import hashlib
import logging
import signal
import threading
from contextlib import contextmanager
from typing import Any, Callable, Protocol

from .errors import CompileError, TypeMismatch
from .lean_lite import EvalError, Program
from .values import InputMap, Value, ValueType

log = logging.getLogger(__name__)

DEFAULT_EXEC_TIMEOUT_S = 2.0


class RuntimeFailure(Exception):
    """An implementation crashed, timed out or returned an ill-typed value."""


class Executor(Protocol):
    def run(self, impl_ref: str, inputs: InputMap) -> Value: ...

    def compile(self, source: str) -> dict[str, str]: ...


class _Timeout(BaseException):
    pass


@contextmanager
def time_limit(seconds: float | None):
    """SIGALRM-based limit; a no-op off the main thread or without setitimer."""
    usable = (
        seconds
        and hasattr(signal, "setitimer")
        and threading.current_thread() is threading.main_thread()
    )
    if not usable:
        yield
        return

    def on_alarm(signum, frame):
        raise _Timeout()

    previous = signal.signal(signal.SIGALRM, on_alarm)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, previous)


def _py_args(inputs: InputMap) -> list[Any]:
    return [list(v.payload) if isinstance(v.payload, tuple) else v.payload for v in inputs.values()]


class BuiltinExecutor:
    """Executes Python reference callables and compiled Lean-fragment definitions.

    ``references`` maps an impl name to ``(fn, output_type)`` where ``fn``
    takes the positional payloads in signature order. Compiled definitions get
    handles of the form ``name#<digest>`` so equally named functions from
    different sources never collide.
    """

    def __init__(
        self,
        references: dict[str, tuple[Callable, ValueType]] | None = None,
        timeout_s: float | None = DEFAULT_EXEC_TIMEOUT_S,
    ):
        self.references = dict(references or {})
        self.timeout_s = timeout_s
        self._compiled: dict[str, tuple[Program, str]] = {}

    def register(self, name: str, fn: Callable, output_type: ValueType) -> None:
        self.references[name] = (fn, output_type)

    def compile(self, source: str) -> dict[str, str]:
        """Compile ``source``; returns ``{def name: handle}`` for non-Prop defs."""
        prog = Program.compile(source)
        digest = hashlib.sha256(source.encode()).hexdigest()[:10]
        handles = {}
        for name, d in prog.defs.items():
            if d.is_prop:
                continue
            handle = f"{name}#{digest}"
            self._compiled[handle] = (prog, name)
            handles[name] = handle
        if not handles:
            raise CompileError("no executable definitions in source")
        return handles

    def knows(self, impl_ref: str) -> bool:
        return impl_ref in self.references or impl_ref in self._compiled

    def run(self, impl_ref: str, inputs: InputMap) -> Value:
        args = _py_args(inputs)
        if impl_ref in self.references:
            fn, out_type = self.references[impl_ref]
            call = lambda: fn(*args)
        elif impl_ref in self._compiled:
            prog, name = self._compiled[impl_ref]
            d = prog.defs[name]
            if d.param_types() != [v.type for v in inputs.values()]:
                raise RuntimeFailure(f"{name}: argument types do not match the input")
            out_type = d.return_type()
            call = lambda: prog.call(name, args)
        else:
            raise RuntimeFailure(f"unknown implementation {impl_ref!r}")
        try:
            with time_limit(self.timeout_s):
                result = call()
        except _Timeout:
            raise RuntimeFailure(f"{impl_ref}: timed out after {self.timeout_s}s") from None
        except (EvalError, RecursionError, ArithmeticError, IndexError, KeyError, TypeError, ValueError) as e:
            raise RuntimeFailure(f"{impl_ref}: {type(e).__name__}: {e}") from None
        try:
            return Value(out_type, result)
        except TypeMismatch as e:
            raise RuntimeFailure(f"{impl_ref}: ill-typed result: {e}") from None
