"""Model providers: a deterministic offline stub plus thin HTTP adapters.

Every provider returns raw reply text and a UsageMeter; schema parsing,
validation, and retries live in the gateway. The stub is pure: identical
inputs produce identical replies and meters on every run and platform.
"""

from __future__ import annotations

import base64
import hashlib
import json
import logging
import os
import re
import time
from typing import TYPE_CHECKING, Protocol

import numpy as np

from .errors import CapabilityError, TransportError
from .schemas import (
    DecompositionSchema,
    IntegerSchema,
    Schema,
    ScoreMapSchema,
    StringMapSchema,
)

if TYPE_CHECKING:
    from .gateway import ModelConfig, UsageMeter

logger = logging.getLogger(__name__)

STUB_EMBEDDING_WIDTH = 64


class Provider(Protocol):
    name: str
    supports_images: bool
    supports_embeddings: bool

    def complete(
        self,
        config: "ModelConfig",
        prompt: str,
        image: bytes | None,
        schema: Schema,
    ) -> tuple[str, "UsageMeter"]: ...

    def embed(
        self, config: "ModelConfig", texts: list[str]
    ) -> tuple[list[list[float]], "UsageMeter"]: ...


def stable_hash(data: bytes) -> int:
    """Platform-stable 64-bit hash used by all stub derivations."""
    return int.from_bytes(hashlib.sha256(data).digest()[:8], "big")


def _synthetic_meter(prompt: str, image: bytes | None, reply: str) -> "UsageMeter":
    from .gateway import UsageMeter

    input_tokens = len(prompt) // 4 + 1
    if image:
        input_tokens += len(image) // 1024 + 1
    return UsageMeter(
        input_tokens=input_tokens,
        output_tokens=len(reply) // 4 + 1,
        wall_time=0.0,
        request_count=1,
    )


_REQUIREMENT = re.compile(r"<<<(.*?)>>>", re.DOTALL)

_NEGATION = {"not", "no", "without", "avoid", "avoiding", "exclude", "excluding", "non"}
_FILLER = {
    "a", "an", "the", "looking", "look", "looks", "style", "styled",
    "theme", "themed", "very", "really", "quite", "with", "that",
    "is", "are", "should", "be", "in", "of", "for",
}


def _dimension_tokens(dim_id: str, name: str) -> set[str]:
    tokens = set(re.split(r"[\s_]+", dim_id.lower())) | set(name.lower().split())
    expanded = set()
    for token in tokens:
        if not token:
            continue
        expanded.add(token)
        expanded.add(token + "s")
        if token.endswith("s"):
            expanded.add(token[:-1])
    return expanded


def heuristic_decomposition(
    query: str, dimensions: tuple[tuple[str, str], ...]
) -> dict[str, dict[str, list[str]]]:
    """Rule-based constraint extraction used by the stub provider.

    Clauses split on commas/and/but; a leading negation marker flips the
    polarity; a dimension id or name word inside the clause picks the
    target dimension, otherwise the previous clause's dimension carries
    over (first dimension as last resort).
    """
    token_map = {dim_id: _dimension_tokens(dim_id, name) for dim_id, name in dimensions}
    result: dict[str, dict[str, list[str]]] = {
        dim_id: {"positive": [], "negative": []} for dim_id, _ in dimensions
    }
    clauses = [c.strip() for c in re.split(r"[,;]|\band\b|\bbut\b", query.lower()) if c.strip()]
    last_dim: str | None = None
    for clause in clauses:
        words = re.findall(r"[a-z0-9']+", clause)
        polarity = "positive"
        while words and words[0] in _NEGATION:
            polarity = "negative"
            words = words[1:]
        hit = None
        for dim_id, _ in dimensions:
            if any(word in token_map[dim_id] for word in words):
                hit = dim_id
                break
        target = hit or last_dim or dimensions[0][0]
        last_dim = target
        kept = [
            word
            for word in words
            if word not in _FILLER and (hit is None or word not in token_map[hit])
        ]
        phrase = " ".join(kept)
        if phrase:
            result[target][polarity].append(phrase)
    return result


class StubProvider:
    """Deterministic offline provider.

    Replies are derived from sha256 over the prompt (and image bytes when
    present): integers are ``hash mod span``, per-key maps hash the key in
    as well, embeddings expand a text-seeded RNG draw to a fixed-width
    unit vector. Decompositions use ``heuristic_decomposition`` unless a
    canned reply was registered for the exact query text.
    """

    name = "stub"
    supports_images = True
    supports_embeddings = True

    def __init__(self, canned_decompositions: dict[str, dict] | None = None):
        self.canned_decompositions = dict(canned_decompositions or {})

    def complete(self, config, prompt, image, schema):
        material = prompt.encode("utf-8") + (image or b"")
        if isinstance(schema, IntegerSchema):
            span = schema.maximum - schema.minimum + 1
            value = schema.minimum + stable_hash(material) % span
        elif isinstance(schema, ScoreMapSchema):
            span = schema.maximum - schema.minimum + 1
            value = {
                key: schema.minimum
                + stable_hash(material + b"\n" + key.encode("utf-8")) % span
                for key in schema.keys
            }
        elif isinstance(schema, StringMapSchema):
            value = {
                key: self._synthetic_text(material, key) for key in schema.keys
            }
        elif isinstance(schema, DecompositionSchema):
            match = _REQUIREMENT.search(prompt)
            query = match.group(1).strip() if match else prompt
            canned = self.canned_decompositions.get(query)
            value = canned if canned is not None else heuristic_decomposition(
                query, schema.dimensions
            )
        else:
            raise ValueError(f"stub provider cannot synthesize schema {schema!r}")
        reply = json.dumps(value, ensure_ascii=False)
        return reply, _synthetic_meter(prompt, image, reply)

    @staticmethod
    def _synthetic_text(material: bytes, key: str) -> str:
        token = hashlib.sha256(material + b"\n" + key.encode("utf-8")).hexdigest()[:12]
        return f"synthetic {key} annotation {token}"

    def embed(self, config, texts):
        from .gateway import UsageMeter

        vectors = [self._embed_one(text) for text in texts]
        meter = UsageMeter(
            input_tokens=sum(len(text) // 4 + 1 for text in texts),
            output_tokens=0,
            wall_time=0.0,
            request_count=1,
        )
        return vectors, meter

    @staticmethod
    def _embed_one(text: str) -> list[float]:
        rng = np.random.default_rng(stable_hash(text.encode("utf-8")))
        vector = rng.standard_normal(STUB_EMBEDDING_WIDTH)
        vector /= np.linalg.norm(vector)
        return vector.tolist()


def _require_key(env_var: str) -> str:
    key = os.environ.get(env_var, "")
    if not key:
        raise TransportError(f"environment variable {env_var} is not set")
    return key


def _post_json(url: str, payload: dict, headers: dict, timeout: float) -> dict:
    import httpx

    try:
        response = httpx.post(url, json=payload, headers=headers, timeout=timeout)
    except httpx.HTTPError as exc:
        raise TransportError(f"request to {url} failed: {exc}") from exc
    if response.status_code != 200:
        raise TransportError(
            f"{url} returned {response.status_code}: {response.text[:500]}"
        )
    return response.json()


class OpenAIProvider:
    """Chat completions + embeddings over the OpenAI REST API."""

    name = "openai"
    supports_images = True
    supports_embeddings = True

    def __init__(self, base_url: str | None = None):
        self.base_url = (
            base_url or os.environ.get("OPENAI_BASE_URL") or "https://api.openai.com/v1"
        )

    def complete(self, config, prompt, image, schema):
        from .gateway import UsageMeter

        key = _require_key("OPENAI_API_KEY")
        content: list[dict] = [{"type": "text", "text": prompt}]
        if image is not None:
            encoded = base64.b64encode(image).decode("ascii")
            content.append(
                {
                    "type": "image_url",
                    "image_url": {"url": f"data:image/png;base64,{encoded}"},
                }
            )
        payload = {
            "model": config.model,
            "temperature": config.temperature,
            "messages": [{"role": "user", "content": content}],
        }
        started = time.perf_counter()
        doc = _post_json(
            f"{self.base_url}/chat/completions",
            payload,
            {"Authorization": f"Bearer {key}"},
            config.timeout,
        )
        usage = doc.get("usage", {})
        meter = UsageMeter(
            input_tokens=int(usage.get("prompt_tokens", 0)),
            output_tokens=int(usage.get("completion_tokens", 0)),
            wall_time=time.perf_counter() - started,
            request_count=1,
        )
        try:
            reply = doc["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed completion response: {doc}") from exc
        return reply, meter

    def embed(self, config, texts):
        from .gateway import UsageMeter

        key = _require_key("OPENAI_API_KEY")
        started = time.perf_counter()
        doc = _post_json(
            f"{self.base_url}/embeddings",
            {"model": config.model, "input": texts},
            {"Authorization": f"Bearer {key}"},
            config.timeout,
        )
        usage = doc.get("usage", {})
        meter = UsageMeter(
            input_tokens=int(usage.get("prompt_tokens", 0)),
            output_tokens=0,
            wall_time=time.perf_counter() - started,
            request_count=1,
        )
        try:
            rows = sorted(doc["data"], key=lambda item: item["index"])
            vectors = [row["embedding"] for row in rows]
        except (KeyError, TypeError) as exc:
            raise TransportError(f"malformed embeddings response: {doc}") from exc
        return vectors, meter


class AnthropicProvider:
    """Messages API adapter; has no embeddings endpoint."""

    name = "anthropic"
    supports_images = True
    supports_embeddings = False

    def __init__(self, base_url: str | None = None):
        self.base_url = (
            base_url
            or os.environ.get("ANTHROPIC_BASE_URL")
            or "https://api.anthropic.com/v1"
        )

    def complete(self, config, prompt, image, schema):
        from .gateway import UsageMeter

        key = _require_key("ANTHROPIC_API_KEY")
        content: list[dict] = [{"type": "text", "text": prompt}]
        if image is not None:
            content.append(
                {
                    "type": "image",
                    "source": {
                        "type": "base64",
                        "media_type": "image/png",
                        "data": base64.b64encode(image).decode("ascii"),
                    },
                }
            )
        payload = {
            "model": config.model,
            "max_tokens": 2048,
            "temperature": config.temperature,
            "messages": [{"role": "user", "content": content}],
        }
        headers = {"x-api-key": key, "anthropic-version": "2023-06-01"}
        started = time.perf_counter()
        doc = _post_json(f"{self.base_url}/messages", payload, headers, config.timeout)
        usage = doc.get("usage", {})
        meter = UsageMeter(
            input_tokens=int(usage.get("input_tokens", 0)),
            output_tokens=int(usage.get("output_tokens", 0)),
            wall_time=time.perf_counter() - started,
            request_count=1,
        )
        try:
            reply = "".join(
                block["text"] for block in doc["content"] if block.get("type") == "text"
            )
        except (KeyError, TypeError) as exc:
            raise TransportError(f"malformed messages response: {doc}") from exc
        return reply, meter

    def embed(self, config, texts):
        raise CapabilityError("anthropic provider has no embeddings endpoint")


class GoogleProvider:
    """generateContent + batchEmbedContents over the Gemini REST API."""

    name = "google"
    supports_images = True
    supports_embeddings = True

    def __init__(self, base_url: str | None = None):
        self.base_url = (
            base_url
            or os.environ.get("GOOGLE_BASE_URL")
            or "https://generativelanguage.googleapis.com/v1beta"
        )

    def complete(self, config, prompt, image, schema):
        from .gateway import UsageMeter

        key = _require_key("GOOGLE_API_KEY")
        parts: list[dict] = [{"text": prompt}]
        if image is not None:
            parts.append(
                {
                    "inline_data": {
                        "mime_type": "image/png",
                        "data": base64.b64encode(image).decode("ascii"),
                    }
                }
            )
        payload = {
            "contents": [{"parts": parts}],
            "generationConfig": {"temperature": config.temperature},
        }
        url = f"{self.base_url}/models/{config.model}:generateContent?key={key}"
        started = time.perf_counter()
        doc = _post_json(url, payload, {}, config.timeout)
        usage = doc.get("usageMetadata", {})
        meter = UsageMeter(
            input_tokens=int(usage.get("promptTokenCount", 0)),
            output_tokens=int(usage.get("candidatesTokenCount", 0)),
            wall_time=time.perf_counter() - started,
            request_count=1,
        )
        try:
            parts = doc["candidates"][0]["content"]["parts"]
            reply = "".join(part.get("text", "") for part in parts)
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed generateContent response: {doc}") from exc
        return reply, meter

    def embed(self, config, texts):
        from .gateway import UsageMeter

        key = _require_key("GOOGLE_API_KEY")
        payload = {
            "requests": [
                {
                    "model": f"models/{config.model}",
                    "content": {"parts": [{"text": text}]},
                }
                for text in texts
            ]
        }
        url = f"{self.base_url}/models/{config.model}:batchEmbedContents?key={key}"
        started = time.perf_counter()
        doc = _post_json(url, payload, {}, config.timeout)
        meter = UsageMeter(
            input_tokens=sum(len(text) // 4 + 1 for text in texts),
            output_tokens=0,
            wall_time=time.perf_counter() - started,
            request_count=1,
        )
        try:
            vectors = [item["values"] for item in doc["embeddings"]]
        except (KeyError, TypeError) as exc:
            raise TransportError(f"malformed batchEmbedContents response: {doc}") from exc
        return vectors, meter


def default_providers() -> dict[str, Provider]:
    return {
        "stub": StubProvider(),
        "openai": OpenAIProvider(),
        "anthropic": AnthropicProvider(),
        "google": GoogleProvider(),
    }
