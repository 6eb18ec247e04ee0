"""LLM-driven seed generation."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass

from .errors import ClientError, NoJsonArray, TypeMismatch
from .llm import LlmClient
from .mutation import dedupe
from .prompts import render_seed_prompt
from .suite import Task
from .values import InputMap, ParamSignature

log = logging.getLogger(__name__)

INVALID_FRACTION = 0.4


@dataclass(frozen=True)
class SeedGenConfig:
    rounds: int = 1
    candidates_per_round: int = 40
    example_limit: int = 5
    invalid_target: int | None = None
    valid_target: int | None = None

    def __post_init__(self):
        n = self.candidates_per_round
        invalid = self.invalid_target
        if invalid is None:
            invalid = n - self.valid_target if self.valid_target is not None else math.ceil(INVALID_FRACTION * n)
        valid = self.valid_target if self.valid_target is not None else n - invalid
        object.__setattr__(self, "invalid_target", invalid)
        object.__setattr__(self, "valid_target", valid)
        if min(self.rounds, n, self.example_limit, invalid, valid) < 0:
            raise ValueError("seed generation counts must be non-negative")
        if invalid + valid != n:
            raise ValueError("invalid_target + valid_target must equal candidates_per_round")


def _locate_array(text: str) -> list:
    stripped = text.strip()
    try:
        doc = json.loads(stripped)
        if isinstance(doc, list):
            return doc
    except json.JSONDecodeError:
        pass
    decoder = json.JSONDecoder()
    pos = text.find("[")
    while pos >= 0:
        try:
            doc, _ = decoder.raw_decode(text, pos)
            if isinstance(doc, list):
                return doc
        except json.JSONDecodeError:
            pass
        pos = text.find("[", pos + 1)
    raise NoJsonArray("no JSON array found in response")


def parse_seed_response(text: str, signature: ParamSignature) -> list[InputMap]:
    """Strictly parse ``[{"input": {...}}, ...]``; bad items are dropped one by one."""
    items = _locate_array(text)
    out = []
    for i, item in enumerate(items):
        if not isinstance(item, dict) or set(item) != {"input"}:
            log.info("seed item %d dropped: expected exactly one key 'input'", i)
            continue
        try:
            out.append(InputMap.from_payloads(item["input"], signature))
        except TypeMismatch as e:
            log.info("seed item %d dropped: %s", i, e)
    return out


def generate_seeds(task: Task, client: LlmClient, cfg: SeedGenConfig) -> list[InputMap]:
    """Base inputs plus every parsed candidate over ``cfg.rounds`` rounds, deduplicated."""
    found: list[InputMap] = []
    system, user = render_seed_prompt(task, cfg)
    for r in range(cfg.rounds):
        try:
            text = client.complete(system, user)
        except ClientError as e:
            raise ClientError(str(e), round_index=r) from e
        except Exception as e:  # transport-specific failures
            raise ClientError(f"{type(e).__name__}: {e}", round_index=r) from e
        try:
            found.extend(parse_seed_response(text, task.signature))
        except NoJsonArray:
            log.warning("task %s round %d: response had no JSON array", task.id, r)
    return dedupe([*task.base_expected_inputs, *task.base_unexpected_inputs, *found])
