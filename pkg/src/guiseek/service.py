"""HTTP facade over datasets, stage-1 search, and reranking.

Request handling is stateless: loaded manifests, stores, and indexes are
immutable and shared, so identical requests against a deterministic
provider produce identical responses. Every response that spent model
tokens carries input/output token counts and the computed cost.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import os
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .datasets import AnnotationStore, DatasetManifest, load_manifest, load_store
from .errors import (
    ConfigError,
    GatewayError,
    GuiseekError,
    NoActiveDimensionError,
    UnknownModelError,
)
from .gateway import Gateway, ModelConfig, PriceTable, UsageMeter, cost_of, stub_config
from .index import EmbeddingIndex, load_index
from .reranker import MODES, FinalRanking, RerankRequest, rerank
from .retrieval import WeightProfile, decompose_query, stage_one_rank

logger = logging.getLogger(__name__)


@dataclass
class DatasetPaths:
    manifest: Path
    store: Path
    index: Path


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    cors_origins: list[str] = field(default_factory=list)
    price_table_path: Path | None = None
    concurrency_ceiling: int = 10
    models: dict[str, ModelConfig] = field(default_factory=dict)
    datasets: dict[str, DatasetPaths] = field(default_factory=dict)

    def model_for(self, stage: str) -> ModelConfig:
        if stage in self.models:
            return self.models[stage]
        return stub_config("embed" if stage == "embed" else "chat")


def load_service_config(path: str | os.PathLike) -> ServiceConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read service config {path}: {exc}") from exc
    base = path.parent

    def resolve(rel: str) -> Path:
        candidate = Path(rel)
        return candidate if candidate.is_absolute() else base / candidate

    datasets = {}
    for name, entry in doc.get("datasets", {}).items():
        try:
            datasets[name] = DatasetPaths(
                manifest=resolve(entry["manifest"]),
                store=resolve(entry["store"]),
                index=resolve(entry["index"]),
            )
        except KeyError as exc:
            raise ConfigError(
                f"dataset {name!r} in {path} is missing key {exc}"
            ) from exc
    models = {
        stage: ModelConfig.from_json(entry)
        for stage, entry in doc.get("models", {}).items()
    }
    price_path = doc.get("price_table")
    return ServiceConfig(
        host=doc.get("host", "127.0.0.1"),
        port=int(doc.get("port", 8000)),
        cors_origins=list(doc.get("cors_origins", [])),
        price_table_path=resolve(price_path) if price_path else None,
        concurrency_ceiling=int(doc.get("concurrency_ceiling", 10)),
        models=models,
        datasets=datasets,
    )


@dataclass
class LoadedDataset:
    name: str
    manifest: DatasetManifest
    store: AnnotationStore
    index: EmbeddingIndex


class SearchBody(BaseModel):
    dataset: str
    query: str
    weights: dict[str, float] | None = None
    top: int | None = 100


class RerankBody(BaseModel):
    dataset: str
    query: str
    mode: str = "text"
    k: int = 100
    weights: dict[str, float] | None = None
    model: str | None = None


def _error(status: int, error: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": error, "detail": detail})


def create_app(config: ServiceConfig, gateway: Gateway | None = None) -> FastAPI:
    """Build the app, loading every registered dataset up front.

    A dataset that fails to load aborts startup with a ConfigError that
    names it: a registry that cannot serve should not come up.
    """
    loaded: dict[str, LoadedDataset] = {}
    for name, paths in config.datasets.items():
        try:
            manifest = load_manifest(paths.manifest)
            store = load_store(paths.store, manifest.dimensions)
            index = load_index(paths.index)
        except GuiseekError as exc:
            raise ConfigError(f"dataset {name!r} failed to load: {exc}") from exc
        loaded[name] = LoadedDataset(name=name, manifest=manifest, store=store, index=index)

    prices = (
        PriceTable.load(config.price_table_path)
        if config.price_table_path is not None
        else PriceTable()
    )
    if gateway is None:
        gateway = Gateway(concurrency_ceiling=config.concurrency_ceiling)

    app = FastAPI(title="guiseek service")
    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(GatewayError)
    def _gateway_error(request, exc: GatewayError):
        return _error(502, type(exc).__name__, str(exc))

    @app.exception_handler(NoActiveDimensionError)
    def _no_active(request, exc):
        return _error(400, "NoActiveDimensionError", str(exc))

    @app.exception_handler(ValueError)
    def _bad_value(request, exc):
        return _error(400, "ValueError", str(exc))

    def usage_block(meter: UsageMeter, model: str) -> dict:
        block = meter.to_json()
        block["model"] = model
        if model in prices:
            block["cost"] = cost_of(meter, model, prices)
        else:
            block["cost"] = None
            block["unpriced"] = True
        return block

    def dataset_or_none(name: str) -> LoadedDataset | None:
        return loaded.get(name)

    @app.get("/datasets")
    def list_datasets():
        return [
            {
                "name": ds.name,
                "gui_count": len(ds.manifest.guis),
                "dimensions": ds.manifest.dimensions.to_records(),
            }
            for ds in loaded.values()
        ]

    @app.post("/search")
    def search(body: SearchBody):
        ds = dataset_or_none(body.dataset)
        if ds is None:
            return _error(404, "UnknownDataset", f"dataset {body.dataset!r} is not registered")
        if not body.query.strip():
            return _error(400, "EmptyQuery", "query must be non-empty")
        try:
            weights = WeightProfile.from_overrides(ds.manifest.dimensions, body.weights)
        except KeyError as exc:
            return _error(400, "UnknownDimension", str(exc))
        decompose_config = config.model_for("decompose")
        embed_config = ModelConfig(provider=ds.index.provider, model=ds.index.model)
        decomposed, decompose_meter = decompose_query(
            body.query, ds.manifest.dimensions, decompose_config, gateway
        )
        result = stage_one_rank(ds.index, decomposed, weights, embed_config, gateway)
        top = body.top if body.top is not None else len(result.entries)
        meter = decompose_meter.merge(result.meter)
        return {
            "dataset": ds.name,
            "query": body.query,
            "decomposition": decomposed.to_json(),
            "results": [
                {
                    "gui_id": entry.gui_id,
                    "total": entry.total,
                    "per_dimension": {
                        dim_id: {"pos": pos, "neg": neg, "s": s}
                        for dim_id, (pos, neg, s) in entry.per_dimension.items()
                    },
                }
                for entry in result.entries[:top]
            ],
            "usage": usage_block(meter, decompose_config.model),
        }

    @app.post("/rerank")
    def rerank_endpoint(body: RerankBody):
        ds = dataset_or_none(body.dataset)
        if ds is None:
            return _error(404, "UnknownDataset", f"dataset {body.dataset!r} is not registered")
        if not body.query.strip():
            return _error(400, "EmptyQuery", "query must be non-empty")
        if body.mode not in MODES:
            return _error(400, "InvalidMode", f"mode must be one of {MODES}, got {body.mode!r}")
        if body.k < 1:
            return _error(400, "InvalidK", f"k must be >= 1, got {body.k}")
        try:
            weights = WeightProfile.from_overrides(ds.manifest.dimensions, body.weights)
        except KeyError as exc:
            return _error(400, "UnknownDimension", str(exc))
        decompose_config = config.model_for("decompose")
        embed_config = ModelConfig(provider=ds.index.provider, model=ds.index.model)
        rerank_config = config.model_for("rerank")
        if body.model:
            rerank_config = ModelConfig(
                provider=rerank_config.provider,
                model=body.model,
                temperature=rerank_config.temperature,
                max_retries=rerank_config.max_retries,
                timeout=rerank_config.timeout,
            )
        decomposed, decompose_meter = decompose_query(
            body.query, ds.manifest.dimensions, decompose_config, gateway
        )
        stage1 = stage_one_rank(ds.index, decomposed, weights, embed_config, gateway)
        request = RerankRequest(
            query=body.query, mode=body.mode, weights=weights,
            model=rerank_config, k=body.k,
        )
        ranking = rerank(
            stage1, request, ds.manifest.dimensions, gateway,
            store=ds.store, manifest=ds.manifest,
        )
        results = [
            {
                "gui_id": score.gui_id,
                "stage": "reranked",
                "aggregate": score.aggregate,
                "scores": score.scores,
                "flags": list(score.flags),
            }
            for score in ranking.head
        ] + [
            {"gui_id": entry.gui_id, "stage": "embedding", "total": entry.total}
            for entry in ranking.tail
        ]
        return {
            "dataset": ds.name,
            "query": body.query,
            "mode": body.mode,
            "k": body.k,
            "results": results,
            "stage1_usage": usage_block(
                decompose_meter.merge(stage1.meter), decompose_config.model
            ),
            "usage": usage_block(ranking.meter, rerank_config.model),
        }

    @app.get("/guis/{dataset}/{gui_id}/image")
    def gui_image(dataset: str, gui_id: str):
        ds = dataset_or_none(dataset)
        if ds is None:
            return _error(404, "UnknownDataset", f"dataset {dataset!r} is not registered")
        try:
            record = ds.manifest.get(gui_id)
        except KeyError:
            return _error(404, "UnknownGui", f"gui {gui_id!r} is not in dataset {dataset!r}")
        path = ds.manifest.image_file(record)
        media_type = mimetypes.guess_type(str(path))[0] or "application/octet-stream"
        return Response(content=path.read_bytes(), media_type=media_type)

    @app.get("/guis/{dataset}/{gui_id}/annotations")
    def gui_annotations(dataset: str, gui_id: str):
        ds = dataset_or_none(dataset)
        if ds is None:
            return _error(404, "UnknownDataset", f"dataset {dataset!r} is not registered")
        if gui_id not in ds.store:
            return _error(404, "UnknownGui", f"gui {gui_id!r} has no annotations")
        return ds.store.get(gui_id)

    return app
