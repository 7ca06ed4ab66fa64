"""Stage-2 reranking: score the top-k stage-1 candidates per dimension on
a 0-100 scale with a multimodal model, in text mode (annotations) or image
mode (screenshots), then aggregate a weighted normalized score.

The reranked head is placed wholly above the untouched stage-1 tail, so
the tail keeps its embedding-score order. Scores are keyed by gui_id, so
the outcome is independent of batch size and worker count.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field

from .datasets import AnnotationStore, DatasetManifest
from .dimensions import DimensionSet
from .errors import CapabilityError, GatewayError, TransportError
from .gateway import Gateway, ModelConfig, UsageMeter
from .retrieval import StageOneEntry, StageOneResult, WeightProfile
from .schemas import ScoreMapSchema

logger = logging.getLogger(__name__)

MODES = ("text", "image")
SCORE_MAX = 100


@dataclass(frozen=True)
class RerankRequest:
    query: str
    mode: str
    weights: WeightProfile
    model: ModelConfig
    k: int = 100
    batch_size: int = 10
    width: int = 10

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.batch_size < 1 or self.width < 1:
            raise ValueError("batch_size and width must be >= 1")


@dataclass(frozen=True)
class RerankScore:
    gui_id: str
    scores: dict[str, int]
    aggregate: float
    meter: UsageMeter
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class PromptParts:
    text: str
    image: bytes | None = None


@dataclass
class FinalRanking:
    """Reranked head (aggregate desc, stage-1 total desc, gui_id asc) above
    the untouched stage-1 tail."""

    head: list[RerankScore]
    tail: list[StageOneEntry]
    meter: UsageMeter
    wall_time: float = 0.0

    def ordered_ids(self) -> list[str]:
        return [score.gui_id for score in self.head] + [
            entry.gui_id for entry in self.tail
        ]


def weighted_dimensions(
    dimensions: DimensionSet, weights: WeightProfile
) -> list[str]:
    return [dim.id for dim in dimensions if weights.get(dim.id) > 0]


def aggregate_score(scores: dict[str, int], weights: WeightProfile) -> float:
    """Normalized weighted mean: sum(w_d * score_d) / (100 * sum(w_d))."""
    active = [dim_id for dim_id in scores if weights.get(dim_id) > 0]
    if not active:
        raise ValueError("no scored dimension has a positive weight")
    weight_sum = sum(weights.get(dim_id) for dim_id in active)
    weighted = sum(weights.get(dim_id) * scores[dim_id] for dim_id in active)
    return weighted / (SCORE_MAX * weight_sum)


def parse_scores(
    raw: dict, required: list[str] | tuple[str, ...]
) -> tuple[dict[str, int], tuple[str, ...]]:
    """Validate a score map, clamping out-of-range values with a flag.

    A missing dimension or non-integer value is a schema failure (the
    gateway retry path); an out-of-range integer is merely clamped.
    """
    from .errors import SchemaViolationError

    scores: dict[str, int] = {}
    flags: list[str] = []
    for dim_id in required:
        value = raw.get(dim_id)
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaViolationError(
                f"score for {dim_id!r} missing or not an integer", raw=raw
            )
        if value < 0 or value > SCORE_MAX:
            flags.append(f"clamped:{dim_id}")
            value = min(max(value, 0), SCORE_MAX)
        scores[dim_id] = value
    return scores, tuple(flags)


def build_rerank_prompt(
    query: str,
    dimensions: DimensionSet,
    weights: WeightProfile,
    mode: str,
    annotations: dict[str, str] | None = None,
    image: bytes | None = None,
) -> PromptParts:
    """Prompt for scoring one candidate on every weighted dimension."""
    active = weighted_dimensions(dimensions, weights)
    lines = [
        "Rate how well the candidate GUI matches the user requirement on",
        "each search dimension, from 0 (no match) to 100 (perfect match).",
        "",
        f"Requirement: <<<{query}>>>",
        "",
        "Search dimensions:",
    ]
    for dim_id in active:
        dim = dimensions.get(dim_id)
        lines.append(f"- {dim.name} (id: {dim.id}): {dim.description}")
    if mode == "text":
        if annotations is None:
            raise ValueError("text mode needs the candidate's annotations")
        lines += ["", "Candidate GUI annotations:"]
        for dim_id in active:
            lines.append(f"- {dim_id}: {annotations.get(dim_id, '')}")
        return PromptParts(text="\n".join(lines))
    if image is None:
        raise ValueError("image mode needs the candidate's screenshot bytes")
    lines += ["", "The candidate GUI screenshot is attached."]
    return PromptParts(text="\n".join(lines), image=image)


def rerank(
    stage1: StageOneResult,
    request: RerankRequest,
    dimensions: DimensionSet,
    gateway: Gateway,
    store: AnnotationStore | None = None,
    manifest: DatasetManifest | None = None,
) -> FinalRanking:
    """Score the stage-1 head and merge it above the untouched tail.

    A GUI whose scoring request exhausts retries keeps flagged zero scores
    so a long paid run still completes; capability and configuration
    errors abort instead.
    """
    if not stage1.entries:
        raise ValueError("stage-1 result is empty")
    active = weighted_dimensions(dimensions, request.weights)
    if not active:
        raise ValueError("no dimension has a positive weight")
    if request.mode == "text" and store is None:
        raise ValueError("text mode needs an annotation store")
    if request.mode == "image" and manifest is None:
        raise ValueError("image mode needs the dataset manifest for image paths")

    head_entries = stage1.entries[: request.k]
    tail = list(stage1.entries[request.k :])
    stage1_total = {entry.gui_id: entry.total for entry in head_entries}
    schema = ScoreMapSchema(keys=tuple(active))

    if request.mode == "text":
        for entry in head_entries:
            if store is not None and not store.is_complete(entry.gui_id):
                raise ValueError(
                    f"gui {entry.gui_id!r} lacks complete annotations for text mode"
                )

    def score_one(entry: StageOneEntry) -> RerankScore:
        if request.mode == "text":
            assert store is not None
            parts = build_rerank_prompt(
                request.query,
                dimensions,
                request.weights,
                "text",
                annotations=store.get(entry.gui_id),
            )
        else:
            assert manifest is not None
            image = manifest.image_file(manifest.get(entry.gui_id)).read_bytes()
            parts = build_rerank_prompt(
                request.query, dimensions, request.weights, "image", image=image
            )
        try:
            if parts.image is None:
                raw, meter = gateway.complete_text(request.model, parts.text, schema)
            else:
                raw, meter = gateway.complete_with_image(
                    request.model, parts.text, parts.image, schema
                )
        except CapabilityError:
            raise
        except GatewayError as exc:
            logger.warning("scoring failed for %s: %s", entry.gui_id, exc)
            zero = {dim_id: 0 for dim_id in active}
            return RerankScore(
                gui_id=entry.gui_id,
                scores=zero,
                aggregate=0.0,
                meter=exc.meter or UsageMeter.zero(),
                flags=("scoring_failed",),
            )
        scores, flags = parse_scores(raw, active)
        return RerankScore(
            gui_id=entry.gui_id,
            scores=scores,
            aggregate=aggregate_score(scores, request.weights),
            meter=meter,
            flags=flags,
        )

    results: dict[str, RerankScore] = {}
    with ThreadPoolExecutor(max_workers=request.width) as pool:
        for start in range(0, len(head_entries), request.batch_size):
            batch = head_entries[start : start + request.batch_size]
            futures = [pool.submit(score_one, entry) for entry in batch]
            for future in as_completed(futures):
                score = future.result()
                results[score.gui_id] = score

    meter = UsageMeter.merge_all(score.meter for score in results.values())
    failed = [s.gui_id for s in results.values() if "scoring_failed" in s.flags]
    if failed and len(failed) == len(head_entries):
        # Isolated flakes keep flagged zero scores, but every single call
        # failing means the provider is down: abort instead of returning a
        # ranking that carries no signal.
        raise TransportError(
            f"provider hard-down: all {len(failed)} scoring requests failed "
            f"(first GUIs: {sorted(failed)[:5]})",
            meter=meter,
        )

    head = sorted(
        results.values(),
        key=lambda score: (-score.aggregate, -stage1_total[score.gui_id], score.gui_id),
    )
    return FinalRanking(head=head, tail=tail, meter=meter, wall_time=meter.wall_time)
