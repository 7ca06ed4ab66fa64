"""Single entry point for the whole pipeline: annotate, embed, search,
rerank, eval, serve. Every subcommand runs offline with ``--stub``.

Exit codes: 0 success, 1 domain error (bad input, failed run), 2 usage
error. Human-readable output goes to stdout, diagnostics to stderr, and
``--json`` switches stdout to machine-readable output.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from .annotator import AnnotationJob, annotate_dataset
from .datasets import load_manifest, load_store
from .errors import GuiseekError
from .evaluation import (
    evaluate_run,
    load_gold,
    load_gold_csv,
    project_cost,
    render_cost_table,
    render_metric_table,
)
from .gateway import Gateway, ModelConfig, PriceTable, UsageMeter, cost_of, with_stub
from .index import build_index, load_index, save_index
from .reranker import RerankRequest, rerank
from .retrieval import WeightProfile, decompose_query, stage_one_rank

logger = logging.getLogger(__name__)

_PROVIDER_PREFIXES = (
    ("stub", "stub"),
    ("gpt-", "openai"),
    ("text-embedding", "openai"),
    ("o3", "openai"),
    ("o4", "openai"),
    ("claude", "anthropic"),
    ("gemini", "google"),
)


def infer_provider(model: str) -> str:
    for prefix, provider in _PROVIDER_PREFIXES:
        if model.startswith(prefix):
            return provider
    return "openai"


@dataclass
class CliContext:
    stub: bool = False
    json_out: bool = False
    config: Path | None = None
    provider: str | None = None

    def chat_config(self, model: str | None) -> ModelConfig:
        if self.stub or model is None:
            return ModelConfig(provider="stub", model="stub-chat")
        return ModelConfig(
            provider=self.provider or infer_provider(model), model=model
        )

    def embed_config(self, model: str | None) -> ModelConfig:
        if self.stub or model is None:
            return ModelConfig(provider="stub", model="stub-embed")
        return ModelConfig(
            provider=self.provider or infer_provider(model), model=model
        )

    def maybe_stub(self, config: ModelConfig) -> ModelConfig:
        return with_stub(config) if self.stub else config


pass_context = click.make_pass_decorator(CliContext)


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except GuiseekError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def parse_weights(text: str | None) -> dict[str, float] | None:
    """Parse ``domain=1,design=2`` into a weight override map."""
    if not text:
        return None
    weights: dict[str, float] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise click.BadParameter(f"expected dim=weight, got {part!r}")
        dim_id, _, value = part.partition("=")
        try:
            weights[dim_id.strip()] = float(value)
        except ValueError:
            raise click.BadParameter(f"weight for {dim_id!r} is not a number: {value!r}")
    return weights


def _weights_option(ctx, param, value):
    return parse_weights(value)


@click.group()
@click.option("--stub", is_flag=True, help="Force the offline stub provider everywhere.")
@click.option("--json", "json_out", is_flag=True, help="Machine-readable stdout.")
@click.option("--provider", default=None, help="Provider id override (openai, anthropic, google).")
@click.option(
    "--config",
    type=click.Path(path_type=Path),
    envvar="GUIRERANK_CONFIG",
    default=None,
    help="Service config path (also via GUIRERANK_CONFIG).",
)
@click.pass_context
def cli(ctx, stub, json_out, provider, config):
    """Natural-language search over GUI screenshot repositories."""
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr)
    ctx.obj = CliContext(stub=stub, json_out=json_out, config=config, provider=provider)


@cli.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--model", default=None, help="Multimodal annotation model name.")
@click.option("--width", default=4, show_default=True, help="Concurrent annotation workers.")
@click.option("--resume", is_flag=True, help="Skip GUIs already in the store.")
@click.option("--store", "store_path", type=click.Path(path_type=Path), default=None,
              help="Store output path (default: <name>.annotations.jsonl next to the manifest).")
@click.option("--failure-threshold", default=0.10, show_default=True,
              help="Abort when the failed fraction exceeds this.")
@pass_context
@guarded
def annotate(ctx, manifest_path, model, width, resume, store_path, failure_threshold):
    """Annotate every GUI in a dataset across all search dimensions."""
    manifest = load_manifest(manifest_path)
    if store_path is None:
        store_path = manifest_path.parent / f"{manifest.name}.annotations.jsonl"
    job = AnnotationJob(
        manifest=manifest,
        model=ctx.chat_config(model),
        store_path=store_path,
        width=width,
        resume=resume,
        failure_threshold=failure_threshold,
    )
    result = annotate_dataset(job, Gateway())
    if ctx.json_out:
        click.echo(json.dumps({
            "store": str(store_path),
            "annotated": len(result.store),
            "failures": [f.gui_id for f in result.failures],
            "usage": result.meter.to_json(),
        }))
    else:
        click.echo(
            f"annotated {len(result.store)} GUIs -> {store_path} "
            f"({result.meter.request_count} requests, "
            f"{len(result.failures)} failures)"
        )


@cli.command()
@click.option("--store", "store_path", required=True, type=click.Path(path_type=Path))
@click.option("--model", default=None, help="Embedding model name.")
@click.option("--manifest", "manifest_path", type=click.Path(path_type=Path), default=None,
              help="Manifest supplying dimension names/descriptions for the index header.")
@click.option("--batch-size", default=64, show_default=True)
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None,
              help="Index output path (default: <name>.index next to the store).")
@pass_context
@guarded
def embed(ctx, store_path, model, manifest_path, batch_size, out_path):
    """Build the per-(GUI, dimension) embedding index from a store."""
    dataset_name = store_path.name
    for suffix in (".jsonl", ".annotations"):
        if dataset_name.endswith(suffix):
            dataset_name = dataset_name[: -len(suffix)]
    dimensions = None
    if manifest_path is not None:
        manifest = load_manifest(manifest_path)
        dimensions = manifest.dimensions
        dataset_name = manifest.name
    store = load_store(store_path, dimensions)
    index, meter = build_index(
        store,
        ctx.embed_config(model),
        Gateway(),
        dataset=dataset_name,
        dimensions=dimensions,
        batch_size=batch_size,
    )
    if out_path is None:
        out_path = store_path.parent / f"{dataset_name}.index"
    save_index(index, out_path)
    if ctx.json_out:
        click.echo(json.dumps({
            "index": str(out_path),
            "guis": len(index.gui_ids),
            "dimensions": list(index.dimensions.ids()),
            "width": index.width,
            "usage": meter.to_json(),
        }))
    else:
        click.echo(
            f"indexed {len(index.gui_ids)} GUIs x {len(index.dimensions)} dimensions "
            f"-> {out_path} ({meter.request_count} embedding requests)"
        )


@cli.command()
@click.option("--index", "index_path", required=True, type=click.Path(path_type=Path))
@click.option("--query", required=True)
@click.option("--weights", default=None, callback=_weights_option,
              help="Overrides like domain=1,design=2.")
@click.option("--top", default=100, show_default=True)
@click.option("--model", default=None, help="Chat model for query decomposition.")
@pass_context
@guarded
def search(ctx, index_path, query, weights, top, model):
    """Stage-1 constrained embedding search."""
    index = load_index(index_path)
    gateway = Gateway()
    profile = WeightProfile.from_overrides(index.dimensions, weights)
    embed_config = ctx.maybe_stub(ModelConfig(provider=index.provider, model=index.model))
    decomposed, decompose_meter = decompose_query(
        query, index.dimensions, ctx.chat_config(model), gateway
    )
    result = stage_one_rank(index, decomposed, profile, embed_config, gateway)
    rows = [
        {
            "gui_id": entry.gui_id,
            "total": entry.total,
            "per_dimension": {
                dim: {"pos": pos, "neg": neg, "s": s}
                for dim, (pos, neg, s) in entry.per_dimension.items()
            },
        }
        for entry in result.entries[:top]
    ]
    if ctx.json_out:
        click.echo(json.dumps(rows))
        return
    for dim_id, cons in decomposed.constraints.items():
        if cons.active:
            pos = ", ".join(f"+{p}" for p in cons.positives)
            neg = ", ".join(f"-{n}" for n in cons.negatives)
            click.echo(f"# {dim_id}: {' '.join(x for x in (pos, neg) if x)}", err=True)
    meter = decompose_meter.merge(result.meter)
    click.echo(f"# tokens in/out: {meter.input_tokens}/{meter.output_tokens}", err=True)
    for row in rows:
        click.echo(f"{row['gui_id']}\t{row['total']:+.4f}")


@cli.command("rerank")
@click.option("--index", "index_path", required=True, type=click.Path(path_type=Path))
@click.option("--query", required=True)
@click.option("--mode", type=click.Choice(["text", "image"]), default="text", show_default=True)
@click.option("--k", default=100, show_default=True)
@click.option("--model", default=None, help="Reranking model name.")
@click.option("--weights", default=None, callback=_weights_option,
              help="Overrides like domain=1,design=2.")
@click.option("--store", "store_path", type=click.Path(path_type=Path), default=None,
              help="Annotation store (default: <name>.annotations.jsonl next to the index).")
@click.option("--manifest", "manifest_path", type=click.Path(path_type=Path), default=None,
              help="Manifest (default: <name>.manifest.json next to the index).")
@click.option("--prices", "prices_path", type=click.Path(path_type=Path), default=None,
              help="Price table JSON for the cost block.")
@click.option("--usage-out", type=click.Path(path_type=Path), default=None,
              help="Write per-GUI usage meters for `eval cost`.")
@click.option("--width", default=10, show_default=True, help="Concurrent scoring workers.")
@pass_context
@guarded
def rerank_cmd(ctx, index_path, query, mode, k, model, weights, store_path,
               manifest_path, prices_path, usage_out, width):
    """Two-stage search: embedding retrieval then model reranking of the top-k."""
    index = load_index(index_path)
    name = index.dataset or index_path.stem
    if store_path is None:
        store_path = index_path.parent / f"{name}.annotations.jsonl"
    if manifest_path is None:
        candidate = index_path.parent / f"{name}.manifest.json"
        manifest_path = candidate if candidate.is_file() else None

    store = load_store(store_path, index.dimensions) if store_path.is_file() else None
    manifest = load_manifest(manifest_path) if manifest_path else None
    gateway = Gateway()
    profile = WeightProfile.from_overrides(index.dimensions, weights)
    embed_config = ctx.maybe_stub(ModelConfig(provider=index.provider, model=index.model))
    rerank_config = ctx.chat_config(model)

    decomposed, decompose_meter = decompose_query(
        query, index.dimensions, ctx.chat_config(model), gateway
    )
    stage1 = stage_one_rank(index, decomposed, profile, embed_config, gateway)
    request = RerankRequest(
        query=query, mode=mode, weights=profile, model=rerank_config, k=k, width=width
    )
    ranking = rerank(
        stage1, request, index.dimensions, gateway, store=store, manifest=manifest
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
    usage = ranking.meter.to_json()
    usage["model"] = rerank_config.model
    if prices_path is not None:
        prices = PriceTable.load(prices_path)
        usage["cost"] = (
            cost_of(ranking.meter, rerank_config.model, prices)
            if rerank_config.model in prices
            else None
        )
    if usage_out is not None:
        Path(usage_out).write_text(json.dumps({
            "model": rerank_config.model,
            "k": len(ranking.head),
            "workers": request.width,
            "per_gui": [score.meter.to_json() for score in ranking.head],
        }, indent=2), encoding="utf-8")
    if ctx.json_out:
        click.echo(json.dumps({"query": query, "mode": mode, "results": results, "usage": usage}))
        return
    click.echo(
        f"# reranked {len(ranking.head)} of {len(results)} candidates; tokens in/out: "
        f"{ranking.meter.input_tokens}/{ranking.meter.output_tokens}",
        err=True,
    )
    for row in results:
        if row["stage"] == "reranked":
            flags = f" [{','.join(row['flags'])}]" if row["flags"] else ""
            click.echo(f"{row['gui_id']}\t{row['aggregate']:.3f}\treranked{flags}")
        else:
            click.echo(f"{row['gui_id']}\t{row['total']:+.4f}\tembedding")


@cli.group("eval", invoke_without_command=True)
@click.option("--gold", "gold_path", type=click.Path(path_type=Path), default=None)
@click.option("--rankings", "rankings_path", type=click.Path(path_type=Path), default=None)
@click.option("--binarize", default=2, show_default=True,
              help="Relevance threshold for AP/MRR/P@k/HITS@k.")
@click.option("--ndcg-gain", type=click.Choice(["linear", "exp"]), default="linear",
              show_default=True)
@click.option("--label", default="run", show_default=True, help="Row label in the table.")
@click.option("--json-out", type=click.Path(path_type=Path), default=None,
              help="Also write the full per-query report as JSON.")
@click.pass_context
def eval_cmd(click_ctx, gold_path, rankings_path, binarize, ndcg_gain, label, json_out):
    """Score a rankings file against a gold standard (or `eval cost ...`)."""
    if click_ctx.invoked_subcommand is not None:
        return
    if gold_path is None or rankings_path is None:
        raise click.UsageError("eval requires --gold and --rankings")
    _run_eval(click_ctx.obj, gold_path, rankings_path, binarize, ndcg_gain, label, json_out)


@guarded
def _run_eval(ctx, gold_path, rankings_path, binarize, ndcg_gain, label, json_out):
    gold = (
        load_gold_csv(gold_path)
        if str(gold_path).endswith(".csv")
        else load_gold(gold_path)
    )
    rankings = json.loads(Path(rankings_path).read_text(encoding="utf-8"))
    report = evaluate_run(gold, rankings, binarize_threshold=binarize, gain=ndcg_gain)
    if json_out is not None:
        Path(json_out).write_text(
            json.dumps(report.to_json(), indent=2), encoding="utf-8"
        )
    if ctx.json_out:
        click.echo(json.dumps(report.to_json()))
    else:
        click.echo(render_metric_table(report, label=label))


@eval_cmd.command()
@click.option("--usage", "usage_path", required=True, type=click.Path(path_type=Path),
              help="Per-GUI usage file written by `rerank --usage-out`.")
@click.option("--prices", "prices_path", required=True, type=click.Path(path_type=Path))
@click.option("--workers", default=None, type=int,
              help="Worker width for runtime projection (default: from the usage file).")
@pass_context
@guarded
def cost(ctx, usage_path, prices_path, workers):
    """Project per-GUI token means to cost and runtime at k=100 and k=500."""
    doc = json.loads(Path(usage_path).read_text(encoding="utf-8"))
    meters = [UsageMeter.from_json(entry) for entry in doc["per_gui"]]
    prices = PriceTable.load(prices_path)
    projection = project_cost(
        meters,
        doc["model"],
        prices,
        k=doc.get("k"),
        workers=workers if workers is not None else int(doc.get("workers", 10)),
    )
    if ctx.json_out:
        click.echo(json.dumps(projection.to_json()))
    else:
        click.echo(render_cost_table(projection))


@cli.command()
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="Service config path (falls back to the global --config / GUIRERANK_CONFIG).")
@click.option("--host", default=None, help="Bind address override.")
@click.option("--port", default=None, type=int, help="Bind port override.")
@pass_context
@guarded
def serve(ctx, config_path, host, port):
    """Run the HTTP service for the UI and programmatic clients."""
    import uvicorn

    from .service import create_app, load_service_config

    config_path = config_path or ctx.config
    if config_path is None:
        raise click.UsageError("serve requires --config (or GUIRERANK_CONFIG)")
    config = load_service_config(config_path)
    app = create_app(config)
    uvicorn.run(app, host=host or config.host, port=port or config.port)


def main():
    cli(prog_name="guiseek")


if __name__ == "__main__":
    main()
