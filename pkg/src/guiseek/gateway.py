"""Single abstraction over chat-completion and embedding model providers.

The gateway owns retries with exponential backoff, structured-output
parsing and validation, a global in-flight request ceiling, and usage
metering. Providers stay dumb transports.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    CapabilityError,
    GatewayError,
    SchemaViolationError,
    TransportError,
    UnknownModelError,
)
from .providers import Provider, default_providers
from .schemas import Schema, extract_json

logger = logging.getLogger(__name__)

DEFAULT_TEMPERATURE = 0.05
BACKOFF_BASE = 0.5
BACKOFF_CAP = 8.0


@dataclass(frozen=True)
class ModelConfig:
    """Provider/model selection plus request behavior."""

    provider: str
    model: str
    temperature: float = DEFAULT_TEMPERATURE
    max_retries: int = 2
    timeout: float = 60.0

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {self.max_retries}")

    def to_json(self) -> dict:
        return {
            "provider": self.provider,
            "model": self.model,
            "temperature": self.temperature,
            "max_retries": self.max_retries,
            "timeout": self.timeout,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ModelConfig":
        return cls(
            provider=doc["provider"],
            model=doc["model"],
            temperature=float(doc.get("temperature", DEFAULT_TEMPERATURE)),
            max_retries=int(doc.get("max_retries", 2)),
            timeout=float(doc.get("timeout", 60.0)),
        )


@dataclass(frozen=True)
class UsageMeter:
    """Token, request, and wall-time accounting; additive under merge."""

    input_tokens: int = 0
    output_tokens: int = 0
    wall_time: float = 0.0
    request_count: int = 0

    def __post_init__(self):
        if (
            self.input_tokens < 0
            or self.output_tokens < 0
            or self.wall_time < 0
            or self.request_count < 0
        ):
            raise ValueError("usage meter fields must be non-negative")

    def merge(self, other: "UsageMeter") -> "UsageMeter":
        return UsageMeter(
            input_tokens=self.input_tokens + other.input_tokens,
            output_tokens=self.output_tokens + other.output_tokens,
            wall_time=self.wall_time + other.wall_time,
            request_count=self.request_count + other.request_count,
        )

    @classmethod
    def zero(cls) -> "UsageMeter":
        return cls()

    @classmethod
    def merge_all(cls, meters: Iterable["UsageMeter"]) -> "UsageMeter":
        total = cls.zero()
        for meter in meters:
            total = total.merge(meter)
        return total

    def to_json(self) -> dict:
        return {
            "input_tokens": self.input_tokens,
            "output_tokens": self.output_tokens,
            "wall_time": self.wall_time,
            "request_count": self.request_count,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "UsageMeter":
        return cls(
            input_tokens=int(doc.get("input_tokens", 0)),
            output_tokens=int(doc.get("output_tokens", 0)),
            wall_time=float(doc.get("wall_time", 0.0)),
            request_count=int(doc.get("request_count", 0)),
        )


@dataclass(frozen=True)
class ModelPrice:
    input_per_1m: float
    output_per_1m: float

    def __post_init__(self):
        if self.input_per_1m < 0 or self.output_per_1m < 0:
            raise ValueError("prices must be >= 0")


@dataclass(frozen=True)
class PriceTable:
    """Per-model prices in currency units per 1M tokens."""

    prices: dict[str, ModelPrice] = field(default_factory=dict)

    def get(self, model: str) -> ModelPrice:
        try:
            return self.prices[model]
        except KeyError:
            raise UnknownModelError(f"model {model!r} not in price table") from None

    def __contains__(self, model: str) -> bool:
        return model in self.prices

    @classmethod
    def from_json(cls, doc: dict) -> "PriceTable":
        prices = {
            model: ModelPrice(
                input_per_1m=float(entry["input_per_1m"]),
                output_per_1m=float(entry["output_per_1m"]),
            )
            for model, entry in doc.items()
        }
        return cls(prices)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "PriceTable":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def cost_of(meter: UsageMeter, model: str, prices: PriceTable) -> float:
    """Linear token cost: in_tokens * in_price/1M + out_tokens * out_price/1M."""
    price = prices.get(model)
    return (
        meter.input_tokens * price.input_per_1m
        + meter.output_tokens * price.output_per_1m
    ) / 1_000_000


def backoff_delays(
    attempts: int, base: float = BACKOFF_BASE, cap: float = BACKOFF_CAP
) -> list[float]:
    """Delays before each retry: base doubling per step, capped; non-decreasing."""
    return [min(base * (2**i), cap) for i in range(attempts)]


_CORRECTIVE_NOTE = (
    "\n\nYour previous reply did not match the required JSON shape. "
    "Reply again with only the JSON value described above."
)


class Gateway:
    """Thread-safe front door to model providers.

    A shared semaphore caps in-flight provider calls across all callers;
    ``sleep`` is injectable so tests can skip real backoff waits.
    """

    def __init__(
        self,
        providers: dict[str, Provider] | None = None,
        concurrency_ceiling: int = 10,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if concurrency_ceiling < 1:
            raise ValueError("concurrency_ceiling must be >= 1")
        self.providers = providers if providers is not None else default_providers()
        self._gate = threading.Semaphore(concurrency_ceiling)
        self._sleep = sleep

    def provider_for(self, config: ModelConfig) -> Provider:
        try:
            return self.providers[config.provider]
        except KeyError:
            raise CapabilityError(f"unknown provider {config.provider!r}") from None

    def complete_text(
        self, config: ModelConfig, prompt: str, schema: Schema
    ) -> tuple[object, UsageMeter]:
        if not prompt.strip():
            raise ValueError("prompt must be non-empty")
        return self._complete(config, prompt, None, schema)

    def complete_with_image(
        self, config: ModelConfig, prompt: str, image: bytes, schema: Schema
    ) -> tuple[object, UsageMeter]:
        if not prompt.strip():
            raise ValueError("prompt must be non-empty")
        if not image:
            raise ValueError("image must be non-empty bytes")
        provider = self.provider_for(config)
        if not provider.supports_images:
            raise CapabilityError(
                f"provider {config.provider!r} does not accept image inputs"
            )
        return self._complete(config, prompt, image, schema)

    def _complete(
        self, config: ModelConfig, prompt: str, image: bytes | None, schema: Schema
    ) -> tuple[object, UsageMeter]:
        provider = self.provider_for(config)
        full_prompt = prompt + "\n\n" + schema.instruction()
        total = UsageMeter.zero()
        delays = backoff_delays(config.max_retries)
        last_error: GatewayError | None = None
        for attempt in range(config.max_retries + 1):
            if attempt > 0:
                self._sleep(delays[attempt - 1])
            try:
                with self._gate:
                    reply, meter = provider.complete(config, full_prompt, image, schema)
                total = total.merge(meter)
                value = schema.validate(extract_json(reply))
                return value, total
            except SchemaViolationError as exc:
                last_error = exc
                logger.warning(
                    "attempt %d/%d: schema violation from %s: %s",
                    attempt + 1, config.max_retries + 1, config.provider, exc,
                )
                full_prompt = prompt + "\n\n" + schema.instruction() + _CORRECTIVE_NOTE
            except TransportError as exc:
                if exc.meter is not None:
                    total = total.merge(exc.meter)
                last_error = exc
                logger.warning(
                    "attempt %d/%d: transport failure from %s: %s",
                    attempt + 1, config.max_retries + 1, config.provider, exc,
                )
        assert last_error is not None
        raise type(last_error)(
            f"{config.provider}/{config.model}: giving up after "
            f"{config.max_retries + 1} attempts: {last_error}",
            meter=total,
            **({"raw": last_error.raw} if isinstance(last_error, SchemaViolationError) else {}),
        )

    def embed_text(
        self, config: ModelConfig, texts: Sequence[str]
    ) -> tuple[list[np.ndarray], UsageMeter]:
        """Embed each text to a unit vector (L2 norm 1 within 1e-6)."""
        if not texts:
            raise ValueError("texts must be a non-empty list")
        if any(not text.strip() for text in texts):
            raise ValueError("every text must be non-empty")
        provider = self.provider_for(config)
        if not provider.supports_embeddings:
            raise CapabilityError(
                f"provider {config.provider!r} does not support embeddings"
            )
        total = UsageMeter.zero()
        delays = backoff_delays(config.max_retries)
        last_error: GatewayError | None = None
        for attempt in range(config.max_retries + 1):
            if attempt > 0:
                self._sleep(delays[attempt - 1])
            try:
                with self._gate:
                    raw, meter = provider.embed(config, list(texts))
                total = total.merge(meter)
                vectors = []
                for row in raw:
                    vector = np.asarray(row, dtype=np.float64)
                    norm = float(np.linalg.norm(vector))
                    if norm == 0.0:
                        raise TransportError("provider returned a zero embedding")
                    vectors.append(vector / norm)
                if len(vectors) != len(texts):
                    raise TransportError(
                        f"provider returned {len(vectors)} vectors for "
                        f"{len(texts)} texts"
                    )
                return vectors, total
            except TransportError as exc:
                if exc.meter is not None:
                    total = total.merge(exc.meter)
                last_error = exc
                logger.warning(
                    "attempt %d/%d: embedding failure from %s: %s",
                    attempt + 1, config.max_retries + 1, config.provider, exc,
                )
        assert last_error is not None
        raise TransportError(
            f"{config.provider}/{config.model}: giving up after "
            f"{config.max_retries + 1} attempts: {last_error}",
            meter=total,
        )


def stub_config(
    kind: str = "chat", temperature: float = DEFAULT_TEMPERATURE
) -> ModelConfig:
    """Offline model config; kind is ``chat`` or ``embed``."""
    return ModelConfig(provider="stub", model=f"stub-{kind}", temperature=temperature)


def with_stub(config: ModelConfig) -> ModelConfig:
    """Rewrite any config to hit the stub provider (used by ``--stub``)."""
    kind = "embed" if "embed" in config.model else "chat"
    return replace(config, provider="stub", model=f"stub-{kind}")
