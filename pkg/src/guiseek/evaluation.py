"""Ranking-metric suite, gold-standard handling, results tables, and
token-cost/runtime projection.

Binary metrics (AP, MRR, Precision@k, HITS@k) binarize graded labels at a
configurable threshold (default: grade >= 2 is relevant). NDCG uses the
graded labels directly with linear gain by default (exponential gain
2^g - 1 available behind a flag).
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import EvaluationError
from .gateway import PriceTable, UsageMeter, cost_of

PRECISION_CUTOFFS = (3, 5, 7, 10)
HITS_CUTOFFS = (1, 3, 5, 10)
NDCG_CUTOFFS = (3, 5, 10, 15)
METRIC_COLUMNS = (
    ["AP", "MRR"]
    + [f"P@{k}" for k in PRECISION_CUTOFFS]
    + [f"H@{k}" for k in HITS_CUTOFFS]
    + [f"N@{k}" for k in NDCG_CUTOFFS]
)
DEFAULT_BINARIZE_THRESHOLD = 2
GAIN_MODES = ("linear", "exp")


@dataclass(frozen=True)
class GoldQuery:
    query_id: str
    text: str
    candidates: tuple[tuple[str, int], ...]  # (gui_id, grade)

    def grades(self) -> dict[str, int]:
        return {gui_id: grade for gui_id, grade in self.candidates}

    def relevant(self, threshold: int) -> set[str]:
        return {gui_id for gui_id, grade in self.candidates if grade >= threshold}


@dataclass(frozen=True)
class GoldStandard:
    queries: tuple[GoldQuery, ...]

    def __post_init__(self):
        seen = set()
        for query in self.queries:
            if query.query_id in seen:
                raise EvaluationError(f"duplicate query_id {query.query_id!r}")
            seen.add(query.query_id)
            gui_ids = [gui_id for gui_id, _ in query.candidates]
            if len(gui_ids) != len(set(gui_ids)):
                raise EvaluationError(
                    f"query {query.query_id!r}: duplicate candidate gui_ids"
                )
            for gui_id, grade in query.candidates:
                if grade < 0:
                    raise EvaluationError(
                        f"query {query.query_id!r}: negative grade for {gui_id!r}"
                    )


def load_gold(path: str | os.PathLike) -> GoldStandard:
    """JSON gold standard: {"queries": [{query_id, text, candidates: [...]}]}."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    queries = tuple(
        GoldQuery(
            query_id=str(entry["query_id"]),
            text=entry.get("text", ""),
            candidates=tuple(
                (cand["gui_id"], int(cand["grade"])) for cand in entry["candidates"]
            ),
        )
        for entry in doc["queries"]
    )
    return GoldStandard(queries=queries)


def load_gold_csv(path: str | os.PathLike) -> GoldStandard:
    """CSV importer with columns query_id, gui_id, grade, text."""
    by_query: dict[str, dict] = {}
    with Path(path).open(newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            entry = by_query.setdefault(
                row["query_id"], {"text": row.get("text", ""), "candidates": []}
            )
            entry["candidates"].append((row["gui_id"], int(row["grade"])))
    queries = tuple(
        GoldQuery(query_id=query_id, text=entry["text"],
                  candidates=tuple(entry["candidates"]))
        for query_id, entry in by_query.items()
    )
    return GoldStandard(queries=queries)


def average_precision(ranking: Sequence[str], relevant: set[str]) -> float:
    """Mean of precision@r over the ranks r holding relevant items."""
    if not relevant:
        raise EvaluationError("average precision is undefined with no relevant items")
    hits = 0
    precisions = []
    for rank, gui_id in enumerate(ranking, start=1):
        if gui_id in relevant:
            hits += 1
            precisions.append(hits / rank)
    if not precisions:
        return 0.0
    return sum(precisions) / len(relevant)


def reciprocal_rank(ranking: Sequence[str], relevant: set[str]) -> float:
    for rank, gui_id in enumerate(ranking, start=1):
        if gui_id in relevant:
            return 1.0 / rank
    return 0.0


def precision_at(ranking: Sequence[str], relevant: set[str], k: int) -> float:
    """|relevant in top-k| / k; the denominator stays k past the list end."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum(1 for gui_id in ranking[:k] if gui_id in relevant) / k


def hits_at(ranking: Sequence[str], relevant: set[str], k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    return 1.0 if any(gui_id in relevant for gui_id in ranking[:k]) else 0.0


def _gain(grade: int, mode: str) -> float:
    if mode == "linear":
        return float(grade)
    if mode == "exp":
        return float(2**grade - 1)
    raise ValueError(f"gain mode must be one of {GAIN_MODES}, got {mode!r}")


def _dcg(grades_in_order: Iterable[int], k: int, gain: str) -> float:
    total = 0.0
    for i, grade in enumerate(list(grades_in_order)[:k], start=1):
        total += _gain(grade, gain) / math.log2(i + 1)
    return total


def ndcg_at(
    ranking: Sequence[str],
    grades: Mapping[str, int],
    k: int,
    gain: str = "linear",
) -> float:
    """DCG@k normalized by the grade-descending ideal; 0 when all grades are 0."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked_grades = [grades.get(gui_id, 0) for gui_id in ranking]
    ideal = sorted(grades.values(), reverse=True)
    idcg = _dcg(ideal, k, gain)
    if idcg == 0.0:
        return 0.0
    return _dcg(ranked_grades, k, gain) / idcg


@dataclass
class MetricReport:
    """Per-query metric values plus arithmetic means, Table-schema columns."""

    per_query: dict[str, dict[str, float]]  # metric -> query_id -> value
    means: dict[str, float]
    binarize_threshold: int
    gain: str
    query_count: int

    def to_json(self) -> dict:
        return {
            "binarize_threshold": self.binarize_threshold,
            "ndcg_gain": self.gain,
            "query_count": self.query_count,
            "means": self.means,
            "per_query": self.per_query,
        }


def evaluate_run(
    gold: GoldStandard,
    rankings: Mapping[str, Sequence[str]],
    binarize_threshold: int = DEFAULT_BINARIZE_THRESHOLD,
    gain: str = "linear",
) -> MetricReport:
    """Score one run of rankings against the gold standard.

    Every gold query must have a ranking that is a permutation of exactly
    its candidate pool.
    """
    if gain not in GAIN_MODES:
        raise ValueError(f"gain mode must be one of {GAIN_MODES}, got {gain!r}")
    per_query: dict[str, dict[str, float]] = {metric: {} for metric in METRIC_COLUMNS}
    for query in gold.queries:
        ranking = rankings.get(query.query_id)
        if ranking is None:
            raise EvaluationError(f"no ranking for query {query.query_id!r}")
        pool = {gui_id for gui_id, _ in query.candidates}
        ranked = list(ranking)
        foreign = set(ranked) - pool
        if foreign:
            raise EvaluationError(
                f"query {query.query_id!r}: ranking contains foreign gui_ids "
                f"{sorted(foreign)[:5]}"
            )
        if set(ranked) != pool or len(ranked) != len(pool):
            raise EvaluationError(
                f"query {query.query_id!r}: ranking must cover exactly its "
                f"candidate pool ({len(pool)} items)"
            )
        relevant = query.relevant(binarize_threshold)
        if not relevant:
            raise EvaluationError(
                f"query {query.query_id!r}: no candidate reaches the binarize "
                f"threshold {binarize_threshold}"
            )
        grades = query.grades()
        qid = query.query_id
        per_query["AP"][qid] = average_precision(ranked, relevant)
        per_query["MRR"][qid] = reciprocal_rank(ranked, relevant)
        for k in PRECISION_CUTOFFS:
            per_query[f"P@{k}"][qid] = precision_at(ranked, relevant, k)
        for k in HITS_CUTOFFS:
            per_query[f"H@{k}"][qid] = hits_at(ranked, relevant, k)
        for k in NDCG_CUTOFFS:
            per_query[f"N@{k}"][qid] = ndcg_at(ranked, grades, k, gain)

    means = {
        metric: sum(values.values()) / len(values)
        for metric, values in per_query.items()
    }
    return MetricReport(
        per_query=per_query,
        means=means,
        binarize_threshold=binarize_threshold,
        gain=gain,
        query_count=len(gold.queries),
    )


def render_metric_table(report: MetricReport, label: str = "run") -> str:
    """Text table with the standard metric columns for one run row."""
    header = [""] + list(METRIC_COLUMNS)
    row = [label] + [f"{report.means[metric]:.3f}" for metric in METRIC_COLUMNS]
    widths = [max(len(h), len(r)) for h, r in zip(header, row)]
    lines = [
        "  ".join(h.rjust(w) for h, w in zip(header, widths)),
        "  ".join(r.rjust(w) for r, w in zip(row, widths)),
    ]
    note = (
        f"binarize threshold: grade >= {report.binarize_threshold}; "
        f"ndcg gain: {report.gain}; queries: {report.query_count}"
    )
    return "\n".join(lines) + "\n" + note


@dataclass
class CostProjection:
    """Per-GUI token means with linear cost/time extrapolation."""

    model: str
    input_per_gui: float
    output_per_gui: float
    cost_at: dict[int, float]
    time_at: dict[int, float]

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "input_tokens_per_gui": self.input_per_gui,
            "output_tokens_per_gui": self.output_per_gui,
            "cost_at": {str(k): v for k, v in self.cost_at.items()},
            "time_at": {str(k): v for k, v in self.time_at.items()},
        }


def project_cost(
    meters: Sequence[UsageMeter],
    model: str,
    prices: PriceTable,
    k: int | None = None,
    workers: int = 10,
    targets: Sequence[int] = (100, 500),
) -> CostProjection:
    """Project cost and runtime from a rerank run's meters.

    ``k`` is the number of reranked GUIs the meters cover (defaults to the
    meter count); per-GUI means extrapolate linearly to each target k, and
    runtime assumes the given worker width.
    """
    if not meters:
        raise EvaluationError("cannot project cost from an empty meter set")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    total = UsageMeter.merge_all(meters)
    basis = k if k is not None else len(meters)
    if basis < 1:
        raise ValueError("k must be >= 1")
    input_per_gui = total.input_tokens / basis
    output_per_gui = total.output_tokens / basis
    wall_per_gui = total.wall_time / basis
    cost_at: dict[int, float] = {}
    time_at: dict[int, float] = {}
    for target in targets:
        scaled = UsageMeter(
            input_tokens=round(input_per_gui * target),
            output_tokens=round(output_per_gui * target),
        )
        cost_at[target] = cost_of(scaled, model, prices)
        time_at[target] = wall_per_gui * target / workers
    return CostProjection(
        model=model,
        input_per_gui=input_per_gui,
        output_per_gui=output_per_gui,
        cost_at=cost_at,
        time_at=time_at,
    )


def render_cost_table(projection: CostProjection) -> str:
    targets = sorted(projection.cost_at)
    header = (
        ["model", "in/GUI", "out/GUI"]
        + [f"cost@{t}" for t in targets]
        + [f"time@{t}" for t in targets]
    )
    row = (
        [
            projection.model,
            f"{projection.input_per_gui:.2f}",
            f"{projection.output_per_gui:.2f}",
        ]
        + [f"${projection.cost_at[t]:.3f}" for t in targets]
        + [f"{projection.time_at[t]:.1f}s" for t in targets]
    )
    widths = [max(len(h), len(r)) for h, r in zip(header, row)]
    return "\n".join(
        "  ".join(cell.rjust(w) for cell, w in zip(cells, widths))
        for cells in (header, row)
    )
