"""LLM client protocol and transports.

Clients only promise ``complete(system, user) -> text``. Retries and
timeouts live inside the client.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import subprocess
import time
import urllib.error
import urllib.request
from collections.abc import Iterable, Sequence
from typing import Protocol

from .errors import ClientError

log = logging.getLogger(__name__)


class LlmClient(Protocol):
    def complete(self, system: str | None, user: str) -> str: ...


def prompt_hash(system: str | None, user: str) -> str:
    material = json.dumps([system or "", user], ensure_ascii=False)
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


class MockLlm:
    """Scripted client: answers by prompt hash, else from a fixed sequence.

    An unmatched prompt with the sequence exhausted raises ClientError.
    """

    def __init__(
        self,
        responses: dict[str, str] | None = None,
        sequence: Iterable[str] = (),
        name: str = "mock",
    ):
        self.responses = dict(responses or {})
        self.sequence = list(sequence)
        self.name = name
        self.calls: list[tuple[str | None, str]] = []
        self._next = 0

    def add(self, system: str | None, user: str, response: str) -> None:
        self.responses[prompt_hash(system, user)] = response

    def complete(self, system: str | None, user: str) -> str:
        self.calls.append((system, user))
        key = prompt_hash(system, user)
        if key in self.responses:
            return self.responses[key]
        if self._next < len(self.sequence):
            self._next += 1
            return self.sequence[self._next - 1]
        raise ClientError(f"{self.name}: no scripted response for prompt {key[:12]}")


class SubprocessLlm:
    """Runs ``command`` per request: JSON ``{system, user, model}`` on stdin, text on stdout."""

    def __init__(self, command: Sequence[str], model: str = "", timeout_s: float = 300.0, retries: int = 2):
        self.command = list(command)
        self.model = model
        self.timeout_s = timeout_s
        self.retries = retries

    def complete(self, system: str | None, user: str) -> str:
        payload = json.dumps({"system": system, "user": user, "model": self.model})
        last = ""
        for attempt in range(self.retries + 1):
            try:
                proc = subprocess.run(
                    self.command, input=payload, capture_output=True, text=True, timeout=self.timeout_s
                )
            except (OSError, subprocess.TimeoutExpired) as e:
                last = str(e)
                continue
            if proc.returncode == 0:
                return proc.stdout
            last = f"exit {proc.returncode}: {proc.stderr.strip()[:200]}"
            log.warning("llm subprocess attempt %d failed: %s", attempt + 1, last)
        raise ClientError(f"llm subprocess failed: {last}")


class HttpLlm:
    """OpenAI-style chat-completions endpoint; key read from ``api_key_env``."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str = "OPENAI_API_KEY",
        timeout_s: float = 300.0,
        retries: int = 2,
        backoff_s: float = 2.0,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.timeout_s = timeout_s
        self.retries = retries
        self.backoff_s = backoff_s

    def _body(self, system: str | None, user: str) -> bytes:
        messages = ([{"role": "system", "content": system}] if system else []) + [
            {"role": "user", "content": user}
        ]
        return json.dumps({"model": self.model, "messages": messages}).encode("utf-8")

    def complete(self, system: str | None, user: str) -> str:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        last = ""
        for attempt in range(self.retries + 1):
            req = urllib.request.Request(self.endpoint, data=self._body(system, user), headers=headers)
            try:
                with urllib.request.urlopen(req, timeout=self.timeout_s) as resp:
                    doc = json.loads(resp.read().decode("utf-8"))
                return doc["choices"][0]["message"]["content"]
            except (urllib.error.URLError, OSError, json.JSONDecodeError, KeyError, IndexError) as e:
                last = str(e)
                log.warning("llm http attempt %d failed: %s", attempt + 1, last)
                if attempt < self.retries:
                    time.sleep(self.backoff_s * (attempt + 1))
        raise ClientError(f"llm endpoint {self.endpoint} failed: {last}")


def client_from_config(cfg: dict) -> LlmClient:
    """Build a client from ``{"kind": "http"|"subprocess", ...}``."""
    kind = cfg.get("kind")
    if kind == "http":
        return HttpLlm(cfg["endpoint"], cfg.get("model", ""), cfg.get("api_key_env", "OPENAI_API_KEY"))
    if kind == "subprocess":
        return SubprocessLlm(cfg["command"], cfg.get("model", ""))
    raise ValueError(f"unknown llm client kind {kind!r}")
