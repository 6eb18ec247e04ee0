"""Tasks, test suites and their on-disk JSON formats."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import SchemaError, TypeMismatch, UnknownType, VeriScaleError
from .values import InputMap, ParamSignature, Value, ValueType

Pair = tuple[InputMap, Value]


@dataclass(frozen=True)
class Task:
    id: str
    description: str
    signature: ParamSignature
    precond_ref: str
    postcond_ref: str
    impl_ref: str
    output_type: ValueType
    base_expected_inputs: tuple[InputMap, ...] = ()
    base_unexpected_inputs: tuple[InputMap, ...] = ()
    precond_text: str = ""
    postcond_text: str = ""

    @property
    def impl_signature(self) -> str:
        return f"def {self.impl_ref} {self.signature.binders()} : {self.output_type.lean}"

    @property
    def precond_signature(self) -> str:
        return f"def {self.precond_ref} {self.signature.binders()} : Prop"

    @property
    def postcond_signature(self) -> str:
        return (
            f"def {self.postcond_ref} {self.signature.binders()}"
            f" (result : {self.output_type.lean}) : Prop"
        )

    @property
    def post_signature(self) -> ParamSignature:
        return ParamSignature(self.signature.params + (("result", self.output_type),))

    @property
    def spec_text(self) -> str:
        """Ground-truth precondition and postcondition source."""
        return f"{self.precond_text}\n\n{self.postcond_text}".strip()


@dataclass
class TestSuite:
    expected_pairs: list[Pair] = field(default_factory=list)
    unexpected_inputs: list[InputMap] = field(default_factory=list)
    unexpected_outputs: list[Pair] = field(default_factory=list)
    task_id: str = ""

    __test__ = False  # not a pytest class

    def counts(self) -> tuple[int, int, int]:
        """(expected pairs, unexpected outputs, unexpected inputs), the Table-1 column order."""
        return (len(self.expected_pairs), len(self.unexpected_outputs), len(self.unexpected_inputs))

    def check_unique(self) -> None:
        for cat, keys in (
            ("expected_pairs", [_pair_key(p) for p in self.expected_pairs]),
            ("unexpected_inputs", [m.key for m in self.unexpected_inputs]),
            ("unexpected_outputs", [_pair_key(p) for p in self.unexpected_outputs]),
        ):
            seen: dict[str, int] = {}
            for i, k in enumerate(keys):
                if k in seen:
                    raise SchemaError(f"/{cat}/{i}", f"duplicate of entry {seen[k]}")
                seen[k] = i

    def to_json(self) -> dict:
        self.check_unique()
        doc: dict[str, Any] = {}
        if self.task_id:
            doc["task_id"] = self.task_id
        doc["expected_pairs"] = [
            {"input": m.to_json(), "output": v.to_json()} for m, v in self.expected_pairs
        ]
        doc["unexpected_inputs"] = [m.to_json() for m in self.unexpected_inputs]
        doc["unexpected_outputs"] = [
            {"input": m.to_json(), "output": v.to_json()} for m, v in self.unexpected_outputs
        ]
        return doc

    @classmethod
    def from_json(cls, doc: Any) -> "TestSuite":
        if not isinstance(doc, dict):
            raise SchemaError("", "suite document must be an object")
        extra = set(doc) - {"task_id", "expected_pairs", "unexpected_inputs", "unexpected_outputs"}
        if extra:
            raise SchemaError("", f"unknown keys {sorted(extra)}")
        suite = cls(task_id=doc.get("task_id", ""))
        if not isinstance(suite.task_id, str):
            raise SchemaError("/task_id", "must be a string")
        for cat in ("expected_pairs", "unexpected_outputs"):
            items = _array(doc, cat)
            for i, item in enumerate(items):
                ptr = f"/{cat}/{i}"
                if not isinstance(item, dict) or set(item) != {"input", "output"}:
                    raise SchemaError(ptr, "expected {input, output}")
                m = _convert(f"{ptr}/input", InputMap.from_json, item["input"])
                v = _convert(f"{ptr}/output", Value.from_json, item["output"])
                getattr(suite, cat).append((m, v))
        for i, item in enumerate(_array(doc, "unexpected_inputs")):
            suite.unexpected_inputs.append(
                _convert(f"/unexpected_inputs/{i}", InputMap.from_json, item)
            )
        suite.check_unique()
        return suite


def _pair_key(p: Pair) -> str:
    m, v = p
    return m.key + "|" + json.dumps(v.to_json(), sort_keys=True)


def _array(doc: dict, key: str) -> list:
    items = doc.get(key, [])
    if not isinstance(items, list):
        raise SchemaError(f"/{key}", "must be an array")
    return items


def _convert(ptr: str, fn, obj):
    try:
        return fn(obj)
    except UnknownType as e:
        raise UnknownType(ptr, e.message) from None
    except (TypeMismatch, VeriScaleError, KeyError, TypeError) as e:
        raise SchemaError(ptr, str(e)) from None


# ---------------------------------------------------------------------------
# task files

_TASK_KEYS = {
    "id", "description", "signature", "precond_ref", "postcond_ref", "impl_ref",
    "output_type", "base_expected_inputs", "base_unexpected_inputs",
    "precond_text", "postcond_text",
}
_TASK_REQUIRED = {"id", "description", "signature", "precond_ref", "postcond_ref", "impl_ref"}


def task_from_json(doc: Any) -> Task:
    if not isinstance(doc, dict):
        raise SchemaError("", "task document must be an object")
    missing = _TASK_REQUIRED - set(doc)
    if missing:
        raise SchemaError("", f"missing keys {sorted(missing)}")
    extra = set(doc) - _TASK_KEYS
    if extra:
        raise SchemaError("", f"unknown keys {sorted(extra)}")
    for key in ("id", "description", "precond_ref", "postcond_ref", "impl_ref"):
        if not isinstance(doc[key], str):
            raise SchemaError(f"/{key}", "must be a string")
    sig_doc = doc["signature"]
    if not isinstance(sig_doc, list) or not sig_doc:
        raise SchemaError("/signature", "must be a non-empty array")
    params = []
    for i, p in enumerate(sig_doc):
        if isinstance(p, str) and ":" in p:
            name, _, tname = p.partition(":")
            p = {"name": name.strip(), "type": tname.strip()}
        if not isinstance(p, dict) or set(p) != {"name", "type"}:
            raise SchemaError(f"/signature/{i}", "expected {name, type}")
        try:
            params.append((p["name"], ValueType.parse(p["type"])))
        except UnknownType as e:
            raise UnknownType(f"/signature/{i}/type", e.message) from None
    try:
        signature = ParamSignature(tuple(params))
    except ValueError as e:
        raise SchemaError("/signature", str(e)) from None
    try:
        output_type = ValueType.parse(doc.get("output_type", "Int"))
    except UnknownType as e:
        raise UnknownType("/output_type", e.message) from None

    def inputs(key: str) -> tuple[InputMap, ...]:
        out = []
        for i, obj in enumerate(_array(doc, key)):
            out.append(_convert(f"/{key}/{i}", lambda o: InputMap.from_payloads(o, signature), obj))
        return tuple(out)

    return Task(
        id=doc["id"],
        description=doc["description"],
        signature=signature,
        precond_ref=doc["precond_ref"],
        postcond_ref=doc["postcond_ref"],
        impl_ref=doc["impl_ref"],
        output_type=output_type,
        base_expected_inputs=inputs("base_expected_inputs"),
        base_unexpected_inputs=inputs("base_unexpected_inputs"),
        precond_text=doc.get("precond_text", ""),
        postcond_text=doc.get("postcond_text", ""),
    )


def task_to_json(task: Task) -> dict:
    return {
        "id": task.id,
        "description": task.description,
        "signature": task.signature.to_json(),
        "output_type": task.output_type.lean,
        "precond_ref": task.precond_ref,
        "postcond_ref": task.postcond_ref,
        "impl_ref": task.impl_ref,
        "precond_text": task.precond_text,
        "postcond_text": task.postcond_text,
        "base_expected_inputs": [m.payloads() for m in task.base_expected_inputs],
        "base_unexpected_inputs": [m.payloads() for m in task.base_unexpected_inputs],
    }


def _read_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise SchemaError("", f"invalid JSON in {path}: {e}") from None


def load_task(path) -> Task:
    return task_from_json(_read_json(path))


def load_tasks(directory) -> list[Task]:
    """Load every ``*.task.json`` (or plain ``*.json``) task file in a directory, sorted by id."""
    directory = Path(directory)
    paths = sorted(directory.glob("*.task.json")) or sorted(directory.glob("*.json"))
    return sorted((load_task(p) for p in paths), key=lambda t: t.id)


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=1, ensure_ascii=True) + "\n"


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_suite(suite: TestSuite, path) -> None:
    atomic_write_text(path, dumps(suite.to_json()))


def load_suite(path) -> TestSuite:
    return TestSuite.from_json(_read_json(path))
