"""Typed values, input maps and parameter signatures.

Eight value types are supported. Lists and arrays share a payload shape
(a finite sequence) but are distinct types: ``List Int`` and ``Array Int``
values with equal elements compare unequal.

Two literal styles exist. The *prover* style is what gets embedded in
verifier probes (``[0, -1]``, ``#[1, 2]``, ``['a', 'b']``, ``"ab"``); the
*json* style is the persisted payload form (``[0, -1]``, ``["a", "b"]``).
:func:`parse_value` accepts either.
"""

from __future__ import annotations

import enum
import json
import string
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from typing import Any, Union

from .errors import TypeMismatch, UnknownType, ValueSyntaxError

# printable 7-bit plus newline and tab
ALLOWED_CHARS = frozenset(string.printable) - {"\r", "\x0b", "\x0c"}
SIGMA_CHAR = tuple(string.ascii_lowercase + string.digits + " ")
SIGMA_SP = ("!", "?", "#", "@", " ", "\n", "\t", '"', "\\")


class ValueType(enum.Enum):
    INT = "Int"
    NAT = "Nat"
    LIST_INT = "List Int"
    ARRAY_INT = "Array Int"
    LIST_NAT = "List Nat"
    ARRAY_NAT = "Array Nat"
    LIST_CHAR = "List Char"
    STRING = "String"

    @property
    def lean(self) -> str:
        return self.value

    @property
    def is_scalar(self) -> bool:
        return self in (ValueType.INT, ValueType.NAT)

    @property
    def is_int_sequence(self) -> bool:
        return self in _INT_SEQUENCES

    @property
    def is_sequence(self) -> bool:
        return not self.is_scalar

    @property
    def is_nat_family(self) -> bool:
        return self in (ValueType.NAT, ValueType.LIST_NAT, ValueType.ARRAY_NAT)

    @property
    def is_array(self) -> bool:
        return self in (ValueType.ARRAY_INT, ValueType.ARRAY_NAT)

    @classmethod
    def parse(cls, name: str) -> "ValueType":
        key = " ".join(str(name).split())
        try:
            return _BY_NAME[key]
        except KeyError:
            raise UnknownType("", f"unsupported parameter type {name!r}") from None


_INT_SEQUENCES = frozenset(
    {ValueType.LIST_INT, ValueType.ARRAY_INT, ValueType.LIST_NAT, ValueType.ARRAY_NAT}
)
_BY_NAME = {t.value: t for t in ValueType}
_BY_NAME.update({t.name: t for t in ValueType})

Payload = Union[int, tuple, str]


def _check_payload(vtype: ValueType, payload: Any) -> Payload:
    """Normalise ``payload`` for ``vtype`` or raise TypeMismatch."""
    if vtype.is_scalar:
        if not isinstance(payload, int) or isinstance(payload, bool):
            raise TypeMismatch(f"{vtype.lean} expects an integer, got {payload!r}")
        if vtype is ValueType.NAT and payload < 0:
            raise TypeMismatch(f"negative value {payload} is not a Nat")
        return payload
    if vtype is ValueType.STRING:
        if not isinstance(payload, str):
            raise TypeMismatch(f"String expects a string, got {payload!r}")
        bad = set(payload) - ALLOWED_CHARS
        if bad:
            raise TypeMismatch(f"characters outside the alphabet: {sorted(bad)!r}")
        return payload
    if isinstance(payload, (str, bytes)) or not isinstance(payload, (list, tuple)):
        raise TypeMismatch(f"{vtype.lean} expects a sequence, got {payload!r}")
    items = tuple(payload)
    if vtype is ValueType.LIST_CHAR:
        for c in items:
            if not isinstance(c, str) or len(c) != 1:
                raise TypeMismatch(f"List Char element {c!r} is not a character")
            if c not in ALLOWED_CHARS:
                raise TypeMismatch(f"character {c!r} outside the alphabet")
        return items
    for z in items:
        if not isinstance(z, int) or isinstance(z, bool):
            raise TypeMismatch(f"{vtype.lean} element {z!r} is not an integer")
        if vtype.is_nat_family and z < 0:
            raise TypeMismatch(f"negative element {z} in {vtype.lean}")
    return items


@dataclass(frozen=True)
class Value:
    type: ValueType
    payload: Payload

    def __init__(self, type: ValueType, payload: Any):
        object.__setattr__(self, "type", type)
        object.__setattr__(self, "payload", _check_payload(type, payload))

    def __repr__(self) -> str:
        return f"Value({self.type.lean}, {render_value(self, 'prover')})"

    def to_json(self) -> dict:
        """Tagged persistence form."""
        return {"type": self.type.lean, "value": payload_to_json(self)}

    @classmethod
    def from_json(cls, obj: Any) -> "Value":
        if not isinstance(obj, dict) or set(obj) != {"type", "value"}:
            raise TypeMismatch(f"expected a tagged value object, got {obj!r}")
        return value_from_json(obj["value"], ValueType.parse(obj["type"]))


def payload_to_json(v: Value) -> Any:
    return list(v.payload) if isinstance(v.payload, tuple) else v.payload


def value_from_json(obj: Any, vtype: ValueType) -> Value:
    """Build a Value from an untagged JSON payload."""
    return Value(vtype, obj)


# ---------------------------------------------------------------------------
# literal rendering


def _prover_char(c: str) -> str:
    esc = {"\n": "\\n", "\t": "\\t", "\\": "\\\\", "'": "\\'"}
    return "'" + esc.get(c, c) + "'"


def _prover_string(s: str) -> str:
    esc = {"\n": "\\n", "\t": "\\t", "\\": "\\\\", '"': '\\"'}
    return '"' + "".join(esc.get(c, c) for c in s) + '"'


def render_value(v: Value, style: str = "prover") -> str:
    if style == "json":
        return json.dumps(payload_to_json(v), separators=(", ", ": "))
    if style != "prover":
        raise ValueError(f"unknown render style {style!r}")
    t = v.type
    if t.is_scalar:
        return str(v.payload)
    if t is ValueType.STRING:
        return _prover_string(v.payload)
    if t is ValueType.LIST_CHAR:
        body = ", ".join(_prover_char(c) for c in v.payload)
    else:
        body = ", ".join(str(z) for z in v.payload)
    return ("#[" if t.is_array else "[") + body + "]"


# ---------------------------------------------------------------------------
# literal parsing

_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", '"': '"', "'": "'", "/": "/"}


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str) -> ValueSyntaxError:
        return ValueSyntaxError(f"{msg} at offset {self.pos} in {self.text!r}")

    def ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, s: str) -> None:
        if not self.text.startswith(s, self.pos):
            raise self.error(f"expected {s!r}")
        self.pos += len(s)

    def integer(self) -> int:
        self.ws()
        if self.peek() == "(":
            self.pos += 1
            z = self.integer()
            self.ws()
            self.expect(")")
            return z
        start = self.pos
        if self.peek() == "-":
            self.pos += 1
        while self.peek().isdigit():
            self.pos += 1
        digits = self.text[start:self.pos]
        if digits in ("", "-"):
            raise self.error("expected an integer")
        return int(digits)

    def quoted(self, quote: str) -> str:
        self.expect(quote)
        out = []
        while True:
            c = self.peek()
            if c == "":
                raise self.error("unterminated literal")
            self.pos += 1
            if c == quote:
                return "".join(out)
            if c == "\\":
                e = self.peek()
                self.pos += 1
                if e == "u":
                    hexdigits = self.text[self.pos:self.pos + 4]
                    if len(hexdigits) != 4:
                        raise self.error("bad unicode escape")
                    try:
                        out.append(chr(int(hexdigits, 16)))
                    except ValueError:
                        raise self.error("bad unicode escape") from None
                    self.pos += 4
                elif e in _ESCAPES:
                    out.append(_ESCAPES[e])
                else:
                    raise self.error(f"unknown escape \\{e}")
            else:
                out.append(c)

    def char(self) -> str:
        self.ws()
        q = self.peek()
        if q not in ("'", '"'):
            raise self.error("expected a character literal")
        s = self.quoted(q)
        if len(s) != 1:
            raise self.error("character literal must hold exactly one character")
        return s

    def sequence(self, item) -> tuple[bool, list]:
        self.ws()
        is_array = False
        if self.peek() == "#":
            is_array = True
            self.pos += 1
        self.expect("[")
        items = []
        self.ws()
        if self.peek() == "]":
            self.pos += 1
            return is_array, items
        while True:
            items.append(item())
            self.ws()
            if self.peek() == ",":
                self.pos += 1
                continue
            self.expect("]")
            return is_array, items

    def done(self) -> None:
        self.ws()
        if self.pos != len(self.text):
            raise self.error("trailing input")


def parse_value(text: str, expected: ValueType) -> Value:
    sc = _Scanner(text)
    sc.ws()
    if expected.is_scalar:
        payload: Any = sc.integer()
    elif expected is ValueType.STRING:
        sc.ws()
        if sc.peek() != '"':
            raise sc.error("expected a string literal")
        payload = sc.quoted('"')
    else:
        item = sc.char if expected is ValueType.LIST_CHAR else sc.integer
        is_array, payload = sc.sequence(item)
        if is_array and not expected.is_array:
            raise TypeMismatch(f"array literal given for {expected.lean}")
    sc.done()
    return Value(expected, payload)


# ---------------------------------------------------------------------------
# signatures and input maps


@dataclass(frozen=True)
class ParamSignature:
    params: tuple[tuple[str, ValueType], ...]

    def __post_init__(self):
        names = [n for n, _ in self.params]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter names in {names}")
        for n in names:
            if not n.isidentifier():
                raise ValueError(f"bad parameter name {n!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.params)

    def type_of(self, name: str) -> ValueType:
        return dict(self.params)[name]

    def __len__(self) -> int:
        return len(self.params)

    def binders(self) -> str:
        """Lean binder list, e.g. ``(xs : List Int) (k : Nat)``."""
        return " ".join(f"({n} : {t.lean})" for n, t in self.params)

    def to_json(self) -> list[dict]:
        return [{"name": n, "type": t.lean} for n, t in self.params]

    @classmethod
    def from_json(cls, items) -> "ParamSignature":
        return cls(tuple((d["name"], ValueType.parse(d["type"])) for d in items))


class InputMap(Mapping):
    """Immutable binding of parameter names to values.

    Iteration order is the insertion order, which callers keep equal to the
    signature order.
    """

    __slots__ = ("_items", "_key")

    def __init__(self, bindings: Mapping[str, Value] | None = None, **kw: Value):
        items = dict(bindings or {}, **kw)
        for k, v in items.items():
            if not isinstance(v, Value):
                raise TypeError(f"binding {k!r} is not a Value: {v!r}")
        self._items = items
        self._key = canonical_key(items)

    def __getitem__(self, name: str) -> Value:
        return self._items[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return hash(self._key)

    def __eq__(self, other) -> bool:
        if isinstance(other, InputMap):
            return self._key == other._key
        return NotImplemented

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={render_value(v)}" for k, v in self._items.items())
        return f"InputMap({inner})"

    @property
    def key(self) -> str:
        """Canonical JSON rendering, used for dedup and priority ordering."""
        return self._key

    def replace(self, name: str, value: Value) -> "InputMap":
        if name not in self._items:
            raise KeyError(name)
        items = dict(self._items)
        items[name] = value
        return InputMap(items)

    def to_json(self) -> dict:
        return {k: v.to_json() for k, v in self._items.items()}

    def payloads(self) -> dict[str, Any]:
        return {k: payload_to_json(v) for k, v in self._items.items()}

    @classmethod
    def from_json(cls, obj: Any, signature: ParamSignature | None = None) -> "InputMap":
        if not isinstance(obj, dict):
            raise TypeMismatch(f"expected an object of bindings, got {obj!r}")
        if signature is None:
            return cls({k: Value.from_json(v) for k, v in obj.items()})
        if set(obj) != set(signature.names):
            raise TypeMismatch(
                f"bindings {sorted(obj)} do not match parameters {list(signature.names)}"
            )
        items = {}
        for name, vtype in signature.params:
            v = Value.from_json(obj[name])
            if v.type is not vtype:
                raise TypeMismatch(f"{name}: expected {vtype.lean}, got {v.type.lean}")
            items[name] = v
        return cls(items)

    @classmethod
    def from_payloads(cls, obj: Any, signature: ParamSignature) -> "InputMap":
        """Build from untagged payloads, typed by ``signature`` (strict key match)."""
        if not isinstance(obj, dict):
            raise TypeMismatch(f"expected an object of bindings, got {obj!r}")
        if set(obj) != set(signature.names):
            raise TypeMismatch(
                f"keys {sorted(obj)} do not match parameters {list(signature.names)}"
            )
        return cls({n: value_from_json(obj[n], t) for n, t in signature.params})

    def well_typed(self, signature: ParamSignature) -> bool:
        if tuple(self._items) != signature.names:
            return set(self._items) == set(signature.names) and all(
                self._items[n].type is t for n, t in signature.params
            )
        return all(self._items[n].type is t for n, t in signature.params)


def canonical_key(bindings: Mapping[str, Value]) -> str:
    return json.dumps(
        {k: v.to_json() for k, v in bindings.items()},
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=True,
    )


def value_key(v: Value) -> str:
    return json.dumps(v.to_json(), sort_keys=True, separators=(",", ":"))
