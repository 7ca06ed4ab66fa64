"""Structured-output schema descriptors for model replies.

Each descriptor renders the instruction appended to a prompt and validates
the parsed reply, raising SchemaViolationError so the gateway can retry
with a corrective note.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass

from .errors import SchemaViolationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegerSchema:
    """A bare JSON integer within [minimum, maximum]."""

    minimum: int = 0
    maximum: int = 100

    def instruction(self) -> str:
        return (
            f"Respond with a single JSON integer between {self.minimum} and "
            f"{self.maximum}, with no other text."
        )

    def validate(self, value) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaViolationError(f"expected an integer, got {value!r}", raw=value)
        if not self.minimum <= value <= self.maximum:
            raise SchemaViolationError(
                f"integer {value} outside [{self.minimum}, {self.maximum}]", raw=value
            )
        return value


@dataclass(frozen=True)
class StringMapSchema:
    """A JSON object mapping each required key to a non-empty string."""

    keys: tuple[str, ...]

    def instruction(self) -> str:
        shape = ", ".join(f'"{key}": "..."' for key in self.keys)
        return (
            "Respond with a single JSON object mapping every key to a "
            f"non-empty string, exactly: {{{shape}}}. No other text."
        )

    def validate(self, value) -> dict[str, str]:
        if not isinstance(value, dict):
            raise SchemaViolationError(f"expected a JSON object, got {value!r}", raw=value)
        out: dict[str, str] = {}
        for key in self.keys:
            text = value.get(key)
            if not isinstance(text, str) or not text.strip():
                raise SchemaViolationError(
                    f"key {key!r} missing or not a non-empty string", raw=value
                )
            out[key] = text.strip()
        return out


@dataclass(frozen=True)
class ScoreMapSchema:
    """A JSON object mapping each required key to an integer score.

    Range is advisory here: out-of-range integers pass validation and are
    clamped (and flagged) downstream, while a missing key or non-integer
    value is a schema violation that triggers a retry.
    """

    keys: tuple[str, ...]
    minimum: int = 0
    maximum: int = 100

    def instruction(self) -> str:
        shape = ", ".join(f'"{key}": <integer>' for key in self.keys)
        return (
            f"Respond with a single JSON object mapping every key to an "
            f"integer from {self.minimum} (no match) to {self.maximum} "
            f"(perfect match), exactly: {{{shape}}}. No other text."
        )

    def validate(self, value) -> dict[str, int]:
        if not isinstance(value, dict):
            raise SchemaViolationError(f"expected a JSON object, got {value!r}", raw=value)
        out: dict[str, int] = {}
        for key in self.keys:
            score = value.get(key)
            if isinstance(score, bool) or not isinstance(score, int):
                raise SchemaViolationError(
                    f"key {key!r} missing or not an integer", raw=value
                )
            out[key] = score
        return out


@dataclass(frozen=True)
class DecompositionSchema:
    """Per-dimension positive/negative constraint phrase lists.

    ``dimensions`` carries (id, name) pairs so offline providers can run
    their own extraction. Unknown dimension keys in a reply are dropped
    with a diagnostic; missing dimensions become empty lists.
    """

    dimensions: tuple[tuple[str, str], ...]

    def ids(self) -> tuple[str, ...]:
        return tuple(dim_id for dim_id, _ in self.dimensions)

    def instruction(self) -> str:
        shape = ", ".join(
            f'"{dim_id}": {{"positive": ["..."], "negative": ["..."]}}'
            for dim_id, _ in self.dimensions
        )
        return (
            "Respond with a single JSON object covering every dimension id, "
            f"exactly: {{{shape}}}. Use short phrases; leave lists empty when "
            "the requirement says nothing for that dimension. No other text."
        )

    def validate(self, value) -> dict[str, dict[str, list[str]]]:
        if not isinstance(value, dict):
            raise SchemaViolationError(f"expected a JSON object, got {value!r}", raw=value)
        known = set(self.ids())
        unknown = set(value) - known
        if unknown:
            logger.warning("dropping unknown dimension ids in decomposition: %s",
                           sorted(unknown))
        out: dict[str, dict[str, list[str]]] = {}
        for dim_id in self.ids():
            entry = value.get(dim_id, {})
            if not isinstance(entry, dict):
                raise SchemaViolationError(
                    f"dimension {dim_id!r} must map to an object", raw=value
                )
            polarities: dict[str, list[str]] = {}
            for polarity in ("positive", "negative"):
                phrases = entry.get(polarity, [])
                if not isinstance(phrases, list):
                    raise SchemaViolationError(
                        f"dimension {dim_id!r}.{polarity} must be a list", raw=value
                    )
                kept = []
                for phrase in phrases:
                    if isinstance(phrase, str) and phrase.strip():
                        kept.append(phrase.strip())
                    else:
                        logger.warning(
                            "dropping empty/non-string %s phrase for %s",
                            polarity, dim_id,
                        )
                polarities[polarity] = kept
            out[dim_id] = polarities
        return out


Schema = IntegerSchema | StringMapSchema | ScoreMapSchema | DecompositionSchema

_FENCE = re.compile(r"^```[a-zA-Z0-9]*\s*|\s*```$")


def extract_json(text: str):
    """Parse the JSON value in a model reply, tolerating code fences.

    Raises SchemaViolationError when no JSON value can be found.
    """
    candidate = _FENCE.sub("", text.strip())
    try:
        return json.loads(candidate)
    except json.JSONDecodeError:
        pass
    # Fall back to the outermost braced region.
    start, end = candidate.find("{"), candidate.rfind("}")
    if start != -1 and end > start:
        try:
            return json.loads(candidate[start : end + 1])
        except json.JSONDecodeError:
            pass
    raise SchemaViolationError(f"reply is not parseable JSON: {text!r}", raw=text)
