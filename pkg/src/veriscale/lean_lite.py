"""A tiny interpreter for the Lean fragment used by the bundled tasks.

It covers ``def`` headers with simple binders, propositional connectives,
bounded quantifiers over lists, arithmetic and comparisons, list/array/string
literals, ``fun`` lambdas, ``match`` on list shape, ``if``/``then``/``else``
and a fixed table of library functions and methods. That is enough to
evaluate the preconditions, postconditions and degenerate adversarial
implementations that the desk-scale pipeline works with, without a Lean
toolchain.

Everything is decided by direct evaluation, so the builtin backend never
times out. Values are plain Python: ``int``, ``bool``, ``list`` (for both
lists and arrays), ``str`` (strings and characters).

Known simplifications: subtraction is integer subtraction (no Nat
truncation) and ``/`` is floor division.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import CompileError
from .values import ValueType

MAX_SIZE = 100_000


class EvalError(Exception):
    """Runtime failure while evaluating a term."""


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<num>\d+)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<chr>'(?:[^'\\]|\\.)')
  | (?P<ident>[A-Za-z_][A-Za-z0-9_'!?]*(?:\.[A-Za-z_][A-Za-z0-9_'!?]*)*)
  | (?P<method>\.[A-Za-z_][A-Za-z0-9_'!?]*)
  | (?P<sym>\#\[|::|\+\+|=>|:=|->|<=|>=|!=|==|&&|\|\||[→≤≥≠¬∧∨∀∃∈∉·()\[\],|+\-*/%<>=:])
    """,
    re.VERBOSE,
)

_ASCII_SYMS = {"->": "→", "<=": "≤", ">=": "≥", "!=": "≠", "==": "=", "&&": "∧", "||": "∨"}
_ESC = {"n": "\n", "t": "\t", "\\": "\\", '"': '"', "'": "'"}
KEYWORDS = {"fun", "match", "with", "if", "then", "else", "by", "def", "true", "false", "True", "False"}


@dataclass
class Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise CompileError(f"unexpected character {text[pos]!r} at offset {pos}")
        kind = m.lastgroup
        s = m.group(kind)
        if kind != "ws":
            if kind == "sym":
                s = _ASCII_SYMS.get(s, s)
            toks.append(Tok(kind, s, pos))
        pos = m.end()
    toks.append(Tok("eof", "", len(text)))
    return toks


def _unescape(body: str) -> str:
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            e = body[i + 1]
            if e not in _ESC:
                raise CompileError(f"unknown escape \\{e}")
            out.append(_ESC[e])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


# ---------------------------------------------------------------------------
# AST: every node is a closure ``env -> value``; compile-time scope checks
# catch unknown identifiers and methods.

Node = Callable[[dict], Any]


def _size_guard(n: int) -> int:
    if n < 0:
        return 0
    if n > MAX_SIZE:
        raise EvalError(f"size {n} exceeds evaluation limit")
    return n


def _as_seq(v) -> list:
    if isinstance(v, str):
        return list(v)
    if isinstance(v, list):
        return v
    raise EvalError(f"expected a sequence, got {v!r}")


def _num(v) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise EvalError(f"expected a number, got {v!r}")
    return v


def _pairwise(rel, xs) -> bool:
    xs = _as_seq(xs)
    return all(rel(xs[i], xs[j]) for i in range(len(xs)) for j in range(i + 1, len(xs)))


def _is_perm(a, b) -> bool:
    return Counter(map(_hashable, _as_seq(a))) == Counter(map(_hashable, _as_seq(b)))


def _hashable(v):
    return tuple(_hashable(x) for x in v) if isinstance(v, list) else v


def _char_pred(fn):
    def check(c):
        if not isinstance(c, str) or len(c) != 1:
            raise EvalError(f"expected a character, got {c!r}")
        return fn(c)

    return check


def _erase_dups(xs):
    out = []
    for x in _as_seq(xs):
        if x not in out:
            out.append(x)
    return out


def _get_bang(xs, i):
    xs = _as_seq(xs)
    i = _num(i)
    if not 0 <= i < len(xs):
        raise EvalError("index out of bounds")
    return xs[i]


def _head_bang(xs):
    xs = _as_seq(xs)
    if not xs:
        raise EvalError("head of empty list")
    return xs[0]


def _last_bang(xs):
    xs = _as_seq(xs)
    if not xs:
        raise EvalError("last of empty list")
    return xs[-1]


def _int_div(a, b):
    a, b = _num(a), _num(b)
    return 0 if b == 0 else a // b


def _int_mod(a, b):
    a, b = _num(a), _num(b)
    return a if b == 0 else a % b


def _sub(a, b):
    return _num(a) - _num(b)


def _reverse(v):
    return v[::-1] if isinstance(v, str) else list(reversed(_as_seq(v)))


# methods: name -> (arity, fn(receiver, *args))
METHODS: dict[str, tuple[int, Callable]] = {
    "length": (0, lambda x: len(_as_seq(x))),
    "size": (0, lambda x: len(_as_seq(x))),
    "reverse": (0, _reverse),
    "toList": (0, lambda x: list(_as_seq(x))),
    "toArray": (0, lambda x: list(_as_seq(x))),
    "data": (0, lambda x: list(_as_seq(x))),
    "asString": (0, lambda x: "".join(_as_seq(x))),
    "sum": (0, lambda x: sum(map(_num, _as_seq(x)))),
    "isEmpty": (0, lambda x: len(_as_seq(x)) == 0),
    "eraseDups": (0, _erase_dups),
    "head!": (0, _head_bang),
    "getLast!": (0, _last_bang),
    "natAbs": (0, lambda x: abs(_num(x))),
    "toNat": (0, lambda x: max(0, _num(x))),
    "isLower": (0, _char_pred(lambda c: "a" <= c <= "z")),
    "isUpper": (0, _char_pred(lambda c: "A" <= c <= "Z")),
    "isDigit": (0, _char_pred(lambda c: "0" <= c <= "9")),
    "isAlpha": (0, _char_pred(lambda c: c.isascii() and c.isalpha())),
    "isWhitespace": (0, _char_pred(lambda c: c in " \t\n\r")),
    "all": (1, lambda x, f: all(bool(f(e)) for e in _as_seq(x))),
    "any": (1, lambda x, f: any(bool(f(e)) for e in _as_seq(x))),
    "filter": (1, lambda x, f: [e for e in _as_seq(x) if f(e)]),
    "map": (1, lambda x, f: [f(e) for e in _as_seq(x)]),
    "count": (1, lambda x, v: sum(1 for e in _as_seq(x) if e == v)),
    "contains": (1, lambda x, v: v in _as_seq(x)),
    "elem": (1, lambda x, v: v in _as_seq(x)),
    "take": (1, lambda x, n: _as_seq(x)[: max(0, _num(n))]),
    "drop": (1, lambda x, n: _as_seq(x)[max(0, _num(n)):]),
    "headD": (1, lambda x, d: _as_seq(x)[0] if _as_seq(x) else d),
    "getD": (2, lambda x, i, d: _as_seq(x)[i] if 0 <= _num(i) < len(_as_seq(x)) else d),
    "get!": (1, _get_bang),
    "push": (1, lambda x, v: _as_seq(x) + [v]),
    "isPerm": (1, _is_perm),
    "foldl": (2, lambda x, f, init: _foldl(f, init, _as_seq(x))),
}


def _foldl(f, acc, xs):
    for e in xs:
        acc = f(acc, e)
    return acc


GLOBALS: dict[str, tuple[int, Callable]] = {
    "List.replicate": (2, lambda n, v: [v] * _size_guard(_num(n))),
    "Array.mkArray": (2, lambda n, v: [v] * _size_guard(_num(n))),
    "Array.replicate": (2, lambda n, v: [v] * _size_guard(_num(n))),
    "mkArray": (2, lambda n, v: [v] * _size_guard(_num(n))),
    "List.range": (1, lambda n: list(range(_size_guard(_num(n))))),
    "Array.range": (1, lambda n: list(range(_size_guard(_num(n))))),
    "List.Pairwise": (2, _pairwise),
    "List.Sorted": (2, _pairwise),
    "List.isPerm": (2, _is_perm),
    "List.Perm": (2, _is_perm),
    "List.sum": (1, lambda x: sum(map(_num, _as_seq(x)))),
    "List.length": (1, lambda x: len(_as_seq(x))),
    "List.reverse": (1, _reverse),
    "Int.ofNat": (1, _num),
    "Int.toNat": (1, lambda x: max(0, _num(x))),
    "Int.natAbs": (1, lambda x: abs(_num(x))),
    "Nat.succ": (1, lambda x: _num(x) + 1),
    "String.mk": (1, lambda x: "".join(_as_seq(x))),
    "max": (2, lambda a, b: max(_num(a), _num(b))),
    "min": (2, lambda a, b: min(_num(a), _num(b))),
}

_BINOPS: dict[str, Callable] = {
    "=": lambda a, b: a == b,
    "≠": lambda a, b: a != b,
    "<": lambda a, b: _num(a) < _num(b),
    "≤": lambda a, b: _num(a) <= _num(b),
    ">": lambda a, b: _num(a) > _num(b),
    "≥": lambda a, b: _num(a) >= _num(b),
    "∈": lambda a, b: a in _as_seq(b),
    "∉": lambda a, b: a not in _as_seq(b),
    "+": lambda a, b: _num(a) + _num(b),
    "-": _sub,
    "*": lambda a, b: _num(a) * _num(b),
    "/": _int_div,
    "%": _int_mod,
    "++": lambda a, b: a + b if isinstance(a, str) else _as_seq(a) + _as_seq(b),
}

_CMP = {"=", "≠", "<", "≤", ">", "≥", "∈", "∉"}


@dataclass
class Def:
    name: str
    params: list[tuple[str, str]]  # (name, type text)
    ret: str
    body_text: str
    body: Node | None = None

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def is_prop(self) -> bool:
        return self.ret in ("Prop", "Bool")

    def param_types(self) -> list[ValueType]:
        return [ValueType.parse(t) for _, t in self.params]

    def return_type(self) -> ValueType:
        return ValueType.parse(self.ret)


class _Parser:
    def __init__(self, text: str, scope: set[str], defs: dict[str, Def]):
        self.toks = tokenize(text)
        self.i = 0
        self.scope = set(scope)
        self.defs = defs

    # -- token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("sym", "ident") and self.tok.text in texts

    def take(self) -> Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        if not self.at(text):
            raise CompileError(f"expected {text!r} but found {self.tok.text!r} at offset {self.tok.pos}")
        self.i += 1

    def done(self) -> None:
        if self.tok.kind != "eof":
            raise CompileError(f"unexpected {self.tok.text!r} at offset {self.tok.pos}")

    # -- grammar
    def expr(self) -> Node:
        if self.at("fun"):
            return self.lam()
        if self.at("∀", "∃"):
            return self.quant()
        if self.at("if"):
            return self.cond()
        if self.at("match"):
            return self.match()
        left = self.disj()
        if self.at("→"):
            self.take()
            right = self.expr()
            return lambda env: (not left(env)) or bool(right(env))
        return left

    def lam(self) -> Node:
        self.expect("fun")
        names = []
        while self.tok.kind == "ident" and not self.at("=>"):
            names.append(self.take().text)
        if not names:
            raise CompileError("lambda without binders")
        self.expect("=>")
        saved = self.scope
        self.scope = saved | set(names)
        body = self.expr()
        self.scope = saved

        def make(env):
            def f(*args):
                if len(args) != len(names):
                    raise EvalError("lambda arity mismatch")
                local = dict(env)
                local.update(zip(names, args))
                return body(local)

            return f

        return make

    def quant(self) -> Node:
        kind = self.take().text
        if self.tok.kind != "ident":
            raise CompileError("expected a bound variable")
        var = self.take().text
        self.expect("∈")
        dom = self.disj()
        self.expect(",")
        saved = self.scope
        self.scope = saved | {var}
        body = self.expr()
        self.scope = saved
        agg = all if kind == "∀" else any

        def run(env):
            return agg(bool(body({**env, var: e})) for e in _as_seq(dom(env)))

        return run

    def cond(self) -> Node:
        self.expect("if")
        c = self.expr()
        self.expect("then")
        a = self.expr()
        self.expect("else")
        b = self.expr()
        return lambda env: a(env) if c(env) else b(env)

    def match(self) -> Node:
        self.expect("match")
        scrut = self.expr()
        self.expect("with")
        arms = []
        while self.at("|"):
            self.take()
            pat, binds = self.pattern()
            self.expect("=>")
            saved = self.scope
            self.scope = saved | set(binds)
            body = self.disj() if not self.at("match", "fun", "if") else self.expr()
            self.scope = saved
            arms.append((pat, body))
        if not arms:
            raise CompileError("match without alternatives")

        def run(env):
            v = scrut(env)
            for pat, body in arms:
                bound = pat(v)
                if bound is not None:
                    return body({**env, **bound})
            raise EvalError("non-exhaustive match")

        return run

    def pattern(self):
        if self.at("["):
            self.take()
            self.expect("]")
            return (lambda v: {} if len(_as_seq(v)) == 0 else None), []
        if self.tok.kind == "ident":
            head = self.take().text
            if self.at("::"):
                self.take()
                if self.tok.kind != "ident":
                    raise CompileError("expected a tail binder")
                tail = self.take().text

                def cons(v):
                    s = _as_seq(v)
                    if not s:
                        return None
                    out = {}
                    if head != "_":
                        out[head] = s[0]
                    if tail != "_":
                        out[tail] = s[1:]
                    return out

                return cons, [b for b in (head, tail) if b != "_"]
            if head == "_":
                return (lambda v: {}), []
            return (lambda v: {head: v}), [head]
        raise CompileError(f"unsupported pattern at {self.tok.text!r}")

    def disj(self) -> Node:
        left = self.conj()
        if self.at("∨"):
            self.take()
            right = self.disj() if not self.at("∀", "∃", "fun") else self.expr()
            return lambda env: bool(left(env)) or bool(right(env))
        return left

    def conj(self) -> Node:
        left = self.neg()
        if self.at("∧"):
            self.take()
            right = self.conj() if not self.at("∀", "∃") else self.expr()
            return lambda env: bool(left(env)) and bool(right(env))
        return left

    def neg(self) -> Node:
        if self.at("¬"):
            self.take()
            inner = self.neg() if not self.at("∀", "∃") else self.expr()
            return lambda env: not inner(env)
        return self.cmp()

    def cmp(self) -> Node:
        left = self.additive()
        if self.tok.kind == "sym" and self.tok.text in _CMP:
            op = _BINOPS[self.take().text]
            right = self.additive()
            return lambda env: op(left(env), right(env))
        return left

    def additive(self) -> Node:
        left = self.mult()
        while self.at("+", "-", "++"):
            op = _BINOPS[self.take().text]
            right = self.mult()
            left = (lambda l, r, o: lambda env: o(l(env), r(env)))(left, right, op)
        return left

    def mult(self) -> Node:
        left = self.unary()
        while self.at("*", "/", "%"):
            op = _BINOPS[self.take().text]
            right = self.unary()
            left = (lambda l, r, o: lambda env: o(l(env), r(env)))(left, right, op)
        return left

    def unary(self) -> Node:
        if self.at("-"):
            self.take()
            inner = self.unary()
            return lambda env: -_num(inner(env))
        return self.app()

    def app(self) -> Node:
        t = self.tok
        if t.kind == "ident" and t.text not in KEYWORDS:
            head = t.text.split(".")[0]
            if t.text in GLOBALS or t.text in self.defs:
                self.take()
                if t.text in GLOBALS:
                    arity, fn = GLOBALS[t.text]
                else:
                    d = self.defs[t.text]
                    arity, fn = d.arity, _def_caller(d)
                args = [self.arg_atom() for _ in range(arity)]
                node = lambda env: fn(*(a(env) for a in args))
                return self.postfix(node)
            if head in self.scope and "." in t.text:
                self.take()
                node = self.var(head)
                for name in t.text.split(".")[1:]:
                    node = self.method(node, name)
                return self.postfix(node)
        return self.postfix(self.atom())

    def arg_atom(self) -> Node:
        t = self.tok
        if t.kind == "ident" and "." in t.text and t.text.split(".")[0] in self.scope:
            self.take()
            node = self.var(t.text.split(".")[0])
            for name in t.text.split(".")[1:]:
                node = self.method(node, name, allow_args=False)
            return self.postfix(node, allow_args=False)
        return self.postfix(self.atom(), allow_args=False)

    def var(self, name: str) -> Node:
        return lambda env: env[name]

    def method(self, recv: Node, name: str, allow_args: bool = True) -> Node:
        if name not in METHODS:
            raise CompileError(f"unknown method .{name}")
        arity, fn = METHODS[name]
        if arity and not allow_args:
            raise CompileError(f".{name} needs parentheses in argument position")
        args = [self.arg_atom() for _ in range(arity)]
        return lambda env: fn(recv(env), *(a(env) for a in args))

    def postfix(self, node: Node, allow_args: bool = True) -> Node:
        while self.tok.kind == "method":
            name = self.take().text[1:]
            node = self.method(node, name, allow_args)
        return node

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.take()
            v = int(t.text)
            return lambda env: v
        if t.kind == "str":
            self.take()
            s = _unescape(t.text[1:-1])
            return lambda env: s
        if t.kind == "chr":
            self.take()
            c = _unescape(t.text[1:-1])
            return lambda env: c
        if t.kind == "ident":
            if t.text in ("true", "True"):
                self.take()
                return lambda env: True
            if t.text in ("false", "False"):
                self.take()
                return lambda env: False
            if t.text in self.scope:
                self.take()
                return self.var(t.text)
            if t.text in GLOBALS or t.text in self.defs:
                # a global in argument position without arguments
                raise CompileError(f"{t.text} must be applied")
            raise CompileError(f"unknown identifier {t.text!r}")
        if self.at("[", "#["):
            self.take()
            items = []
            if not self.at("]"):
                items.append(self.expr())
                while self.at(","):
                    self.take()
                    items.append(self.expr())
            self.expect("]")
            return lambda env: [it(env) for it in items]
        if self.at("("):
            self.take()
            if self.at("·"):
                self.take()
                op_tok = self.take()
                if op_tok.text not in _BINOPS:
                    raise CompileError(f"unsupported section operator {op_tok.text!r}")
                op = _BINOPS[op_tok.text]
                self.expect("·")
                self.expect(")")
                return lambda env: (lambda a, b: op(a, b))
            inner = self.expr()
            self.expect(")")
            return inner
        raise CompileError(f"unexpected {t.text or 'end of input'!r} at offset {t.pos}")


def _def_caller(d: Def) -> Callable:
    def call(*args):
        if d.body is None:
            raise EvalError(f"{d.name} is not compiled")
        return d.body(dict(zip((n for n, _ in d.params), args)))

    return call


def compile_expr(text: str, scope: set[str] | frozenset = frozenset(), defs: dict[str, Def] | None = None) -> Node:
    p = _Parser(text, set(scope), defs or {})
    node = p.expr()
    p.done()
    return node


# ---------------------------------------------------------------------------
# definitions

_DEF_HEAD = re.compile(r"^\s*(?:@\[[^\]]*\]\s*)?def\s+([A-Za-z_][A-Za-z0-9_'!?.]*)", re.M)
_BINDER = re.compile(r"\(\s*([A-Za-z_][A-Za-z0-9_' ]*?)\s*:\s*([^()]+?)\s*\)")


def _strip_comments(src: str) -> str:
    return re.sub(r"--[^\n]*", "", src)


def parse_defs(source: str) -> list[Def]:
    """Split ``source`` into ``def`` declarations (bodies not yet compiled)."""
    src = _strip_comments(source)
    heads = list(_DEF_HEAD.finditer(src))
    if not heads:
        raise CompileError("no definitions found")
    if src[: heads[0].start()].strip():
        raise CompileError(f"unexpected text before first def: {src[: heads[0].start()].strip()[:40]!r}")
    out = []
    for k, m in enumerate(heads):
        end = heads[k + 1].start() if k + 1 < len(heads) else len(src)
        chunk = src[m.end():end]
        sep = chunk.find(":=")
        if sep < 0:
            raise CompileError(f"def {m.group(1)}: missing ':='")
        header, body = chunk[:sep], chunk[sep + 2:]
        colon = _top_level_colon(header)
        if colon < 0:
            raise CompileError(f"def {m.group(1)}: missing return type")
        binders_text, ret = header[:colon], " ".join(header[colon + 1:].split())
        params = []
        rest = _BINDER.sub(lambda b: params.extend((n, " ".join(b.group(2).split())) for n in b.group(1).split()) or "", binders_text)
        if rest.strip():
            raise CompileError(f"def {m.group(1)}: cannot parse binders {rest.strip()!r}")
        if not body.strip():
            raise CompileError(f"def {m.group(1)}: empty body")
        out.append(Def(m.group(1), params, ret, body.strip()))
    return out


def _top_level_colon(header: str) -> int:
    depth = 0
    for i, c in enumerate(header):
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif c == ":" and depth == 0:
            return i
    return -1


@dataclass
class Program:
    """A compiled set of definitions; later ones may call earlier ones."""

    source: str = ""
    defs: dict[str, Def] = field(default_factory=dict)

    @classmethod
    def compile(cls, source: str, base: "Program | None" = None) -> "Program":
        defs = dict(base.defs) if base else {}
        for d in parse_defs(source):
            if d.ret not in ("Prop", "Bool"):
                try:
                    d.return_type()
                except Exception:
                    raise CompileError(f"def {d.name}: unsupported return type {d.ret!r}") from None
            for pname, ptype in d.params:
                try:
                    ValueType.parse(ptype)
                except Exception:
                    raise CompileError(f"def {d.name}: unsupported binder type {ptype!r} for {pname}") from None
            d.body = compile_expr(d.body_text, {n for n, _ in d.params}, defs)
            defs[d.name] = d
        return cls(source=source, defs=defs)

    def call(self, name: str, args: list) -> Any:
        d = self.defs.get(name)
        if d is None:
            raise EvalError(f"unknown definition {name}")
        if len(args) != d.arity:
            raise EvalError(f"{name} expects {d.arity} arguments, got {len(args)}")
        try:
            return d.body(dict(zip((n for n, _ in d.params), args)))
        except RecursionError:
            raise EvalError("recursion limit") from None

    def evaluate(self, text: str) -> Any:
        """Evaluate a closed expression over this program's definitions."""
        node = compile_expr(text, frozenset(), self.defs)
        try:
            return node({})
        except RecursionError:
            raise EvalError("recursion limit") from None


def split_conjuncts(body: str) -> list[str]:
    """Top-level ``∧`` clauses of a proposition body.

    Brackets and literals are respected, and a top-level binder (``∀``,
    ``∃``, ``fun``) swallows the rest of the body as in Lean.
    """
    parts, depth, start, i = [], 0, 0, 0
    quote = ""
    while i < len(body):
        c = body[i]
        if quote:
            if c == "\\":
                i += 2
                continue
            if c == quote:
                quote = ""
        elif c == '"' or (c == "'" and not (i > 0 and (body[i - 1].isalnum() or body[i - 1] == "_"))):
            quote = c
        elif c in "([":
            depth += 1
        elif c in ")]":
            depth -= 1
        elif depth == 0 and (c in "∀∃" or re.match(r"fun\b", body[i:]) and (i == 0 or not body[i - 1].isalnum())):
            break
        elif c == "→" and depth == 0:
            return [" ".join(body.split())]
        elif c == "∧" and depth == 0:
            parts.append(body[start:i])
            start = i + 1
        i += 1
    parts.append(body[start:])
    return [" ".join(p.split()) for p in parts if p.strip()]
