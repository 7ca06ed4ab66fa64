"""Stage-1 constrained retrieval: decompose the requirement into
per-dimension positive/negative constraint phrases, embed them, and score
every GUI with a normalized weighted sum of per-dimension similarities.

Per dimension, multiple phrases aggregate by max (each phrase is an
independent sufficient criterion), the negative similarity is subtracted
from the positive, and the result is clamped to [-1, 1]. Dimension totals
combine as sum(w_d * s_d) / sum(w_d) over active dimensions, so scaling
all weights by a common factor changes nothing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .dimensions import DimensionSet
from .errors import NoActiveDimensionError
from .gateway import Gateway, ModelConfig, UsageMeter
from .index import EmbeddingIndex
from .schemas import DecompositionSchema

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DimensionConstraints:
    positives: tuple[str, ...] = ()
    negatives: tuple[str, ...] = ()

    def __post_init__(self):
        for phrase in self.positives + self.negatives:
            if not phrase.strip():
                raise ValueError("constraint phrases must be non-empty")

    @property
    def active(self) -> bool:
        return bool(self.positives or self.negatives)


@dataclass(frozen=True)
class DecomposedQuery:
    """Raw requirement plus per-dimension constraint phrase lists."""

    query: str
    constraints: dict[str, DimensionConstraints]

    def to_json(self) -> dict:
        return {
            dim_id: {
                "positive": list(cons.positives),
                "negative": list(cons.negatives),
            }
            for dim_id, cons in self.constraints.items()
        }


@dataclass(frozen=True)
class WeightProfile:
    """Per-dimension emphasis; dimensions with weight 0 are ignored."""

    weights: dict[str, float]

    def __post_init__(self):
        for dim_id, weight in self.weights.items():
            if weight < 0:
                raise ValueError(f"weight for {dim_id!r} must be >= 0, got {weight}")

    def get(self, dim_id: str) -> float:
        return self.weights.get(dim_id, 0.0)

    @classmethod
    def from_overrides(
        cls, dimensions: DimensionSet, overrides: dict[str, float] | None = None
    ) -> "WeightProfile":
        """Default weights from the dimension set, selectively overridden."""
        weights = dimensions.default_weights()
        for dim_id, weight in (overrides or {}).items():
            if dim_id not in weights:
                raise KeyError(f"unknown dimension {dim_id!r} in weights")
            weights[dim_id] = float(weight)
        return cls(weights)


@dataclass(frozen=True)
class DimensionScores:
    """Per-GUI similarity arrays for one dimension, in registry order."""

    pos: np.ndarray
    neg: np.ndarray
    s: np.ndarray


@dataclass(frozen=True)
class StageOneEntry:
    gui_id: str
    total: float
    per_dimension: dict[str, tuple[float, float, float]]  # dim -> (pos, neg, s)


@dataclass(frozen=True)
class StageOneResult:
    """Full ranking, descending by total, ties broken by ascending gui_id."""

    query: str
    entries: list[StageOneEntry]
    meter: UsageMeter = field(default_factory=UsageMeter)

    def ordered_ids(self) -> list[str]:
        return [entry.gui_id for entry in self.entries]


def build_decomposition_prompt(query: str, dimensions: DimensionSet) -> str:
    lines = [
        "You translate a user's interface requirement into retrieval",
        "constraints over the search dimensions below.",
        "",
        "Search dimensions:",
    ]
    for dim in dimensions:
        lines.append(f"- {dim.id}: {dim.name}. {dim.description}")
    lines += [
        "",
        "Extract positive and negative constraint phrases per dimension.",
        "A constraint is positive when the user asks for it and negative",
        "when the user rules it out. Keep phrases short and close to the",
        "user's wording.",
        "",
        f"Requirement: <<<{query}>>>",
    ]
    return "\n".join(lines)


def decompose_query(
    query: str,
    dimensions: DimensionSet,
    config: ModelConfig,
    gateway: Gateway,
) -> tuple[DecomposedQuery, UsageMeter]:
    """LLM-extract per-dimension constraints from the raw requirement."""
    if not query.strip():
        raise ValueError("query must be non-empty")
    schema = DecompositionSchema(
        dimensions=tuple((dim.id, dim.name) for dim in dimensions)
    )
    prompt = build_decomposition_prompt(query, dimensions)
    value, meter = gateway.complete_text(config, prompt, schema)
    constraints = {
        dim_id: DimensionConstraints(
            positives=tuple(entry["positive"]),
            negatives=tuple(entry["negative"]),
        )
        for dim_id, entry in value.items()
    }
    return DecomposedQuery(query=query, constraints=constraints), meter


def score_dimension(
    index: EmbeddingIndex,
    dimension_id: str,
    positives: tuple[str, ...] | list[str],
    negatives: tuple[str, ...] | list[str],
    config: ModelConfig,
    gateway: Gateway,
    negative_weight: float = 1.0,
) -> tuple[DimensionScores, UsageMeter]:
    """Score one dimension for every GUI.

    pos = max cosine over positive phrases (0 with none), neg likewise;
    s = clamp(pos - negative_weight * neg, -1, 1).
    """
    positives = [p for p in positives]
    negatives = [n for n in negatives]
    if not positives and not negatives:
        raise ValueError("at least one positive or negative phrase is required")
    matrix = index.matrix(dimension_id)
    n = matrix.shape[0]

    phrases = positives + negatives
    vectors, meter = gateway.embed_text(config, phrases)
    stacked = np.stack(vectors)  # unit rows, float64
    # einsum without optimization reduces each output element in a fixed
    # order, so equal rows score equal regardless of their position; BLAS
    # matmul breaks exact ties with row-blocked accumulation.
    sims = np.einsum("ij,kj->ik", matrix.astype(np.float64), stacked, optimize=False)
    # Cosines are mathematically in [-1, 1]; clip float32 storage noise.
    sims = np.clip(sims, -1.0, 1.0)

    if positives:
        pos = sims[:, : len(positives)].max(axis=1)
    else:
        pos = np.zeros(n)
    if negatives:
        neg = sims[:, len(positives) :].max(axis=1)
    else:
        neg = np.zeros(n)
    s = np.clip(pos - negative_weight * neg, -1.0, 1.0)
    return DimensionScores(pos=pos, neg=neg, s=s), meter


def stage_one_rank(
    index: EmbeddingIndex,
    decomposed: DecomposedQuery,
    weights: WeightProfile,
    config: ModelConfig,
    gateway: Gateway,
    negative_weight: float = 1.0,
) -> StageOneResult:
    """Rank every GUI by the normalized weighted sum over active dimensions.

    A dimension is active when it has at least one constraint phrase and a
    positive weight; inactive dimensions contribute nothing.
    """
    active: list[str] = []
    for dim_id in index.dimensions.ids():
        cons = decomposed.constraints.get(dim_id)
        if cons is not None and cons.active and weights.get(dim_id) > 0:
            active.append(dim_id)
    if not active:
        raise NoActiveDimensionError(
            "no dimension has both constraint phrases and a positive weight"
        )

    n = len(index.gui_ids)
    per_dim: dict[str, DimensionScores] = {}
    total_meter = UsageMeter.zero()
    for dim_id in active:
        cons = decomposed.constraints[dim_id]
        scores, meter = score_dimension(
            index,
            dim_id,
            cons.positives,
            cons.negatives,
            config,
            gateway,
            negative_weight=negative_weight,
        )
        per_dim[dim_id] = scores
        total_meter = total_meter.merge(meter)

    weight_vec = np.array([weights.get(dim_id) for dim_id in active])
    score_matrix = np.stack([per_dim[dim_id].s for dim_id in active])  # (dims, guis)
    # Same fixed-order reduction rationale as in score_dimension.
    totals = np.einsum("i,ij->j", weight_vec, score_matrix, optimize=False)
    totals /= weight_vec.sum()

    entries = [
        StageOneEntry(
            gui_id=gui_id,
            total=float(totals[row]),
            per_dimension={
                dim_id: (
                    float(per_dim[dim_id].pos[row]),
                    float(per_dim[dim_id].neg[row]),
                    float(per_dim[dim_id].s[row]),
                )
                for dim_id in active
            },
        )
        for row, gui_id in enumerate(index.gui_ids)
    ]
    entries.sort(key=lambda entry: (-entry.total, entry.gui_id))
    return StageOneResult(query=decomposed.query, entries=entries, meter=total_meter)
