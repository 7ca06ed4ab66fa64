import numpy as np
import pytest

from guiseek.datasets import AnnotationStore, load_manifest
from guiseek.dimensions import DimensionSet, SearchDimension, default_dimension_set
from guiseek.errors import SchemaViolationError, TransportError
from guiseek.gateway import Gateway, ModelConfig, UsageMeter
from guiseek.index import build_index
from guiseek.reranker import (
    FinalRanking,
    RerankRequest,
    aggregate_score,
    build_rerank_prompt,
    parse_scores,
    rerank,
)
from guiseek.retrieval import (
    DecomposedQuery,
    DimensionConstraints,
    WeightProfile,
    stage_one_rank,
)

from conftest import write_dataset


def two_dims():
    return DimensionSet(
        (
            SearchDimension(id="domain", name="Domain", description="what it is for"),
            SearchDimension(id="design", name="Design", description="how it looks"),
        )
    )


def make_stage1(tmp_path, gateway, embed_config, n=6):
    paths = write_dataset(tmp_path, n=n)
    manifest = load_manifest(paths["manifest"])
    store = AnnotationStore(manifest.dimensions.ids())
    for i, record in enumerate(manifest.guis):
        store.set(
            record.gui_id,
            {dim: f"{dim} description {i}" for dim in manifest.dimensions.ids()},
        )
    index, _ = build_index(store, embed_config, gateway, dataset=manifest.name)
    decomposed = DecomposedQuery(
        query="a bright shopping screen",
        constraints={
            "domain": DimensionConstraints(positives=("shopping",)),
            "design": DimensionConstraints(positives=("bright",), negatives=("dark",)),
        },
    )
    weights = WeightProfile.from_overrides(manifest.dimensions)
    stage1 = stage_one_rank(index, decomposed, weights, embed_config, gateway)
    return manifest, store, index, stage1, weights


# ---------------------------------------------------------------------------
# aggregate_score / parse_scores / prompt


def test_aggregate_is_weighted_normalized_sum():
    weights = WeightProfile({"design": 1.0, "domain": 1.0})
    assert aggregate_score({"design": 80, "domain": 100}, weights) == pytest.approx(0.9)


def test_aggregate_bounds_and_extremes():
    weights = WeightProfile({"a": 2.0, "b": 0.5})
    assert aggregate_score({"a": 100, "b": 100}, weights) == 1.0
    assert aggregate_score({"a": 0, "b": 0}, weights) == 0.0
    rng = np.random.default_rng(3)
    for _ in range(100):
        scores = {"a": int(rng.integers(0, 101)), "b": int(rng.integers(0, 101))}
        assert 0.0 <= aggregate_score(scores, weights) <= 1.0


def test_aggregate_matches_brute_force_weighted_mean():
    rng = np.random.default_rng(5)
    for _ in range(200):
        dims = [f"d{i}" for i in range(int(rng.integers(1, 6)))]
        weights = WeightProfile({d: float(rng.uniform(0.1, 4)) for d in dims})
        scores = {d: int(rng.integers(0, 101)) for d in dims}
        num = sum(weights.get(d) * scores[d] for d in dims)
        den = 100 * sum(weights.get(d) for d in dims)
        assert aggregate_score(scores, weights) == pytest.approx(num / den, abs=1e-12)


def test_aggregate_monotone_in_each_dimension():
    weights = WeightProfile({"a": 1.0, "b": 2.0})
    base = aggregate_score({"a": 40, "b": 70}, weights)
    assert aggregate_score({"a": 41, "b": 70}, weights) > base
    assert aggregate_score({"a": 40, "b": 71}, weights) > base


def test_aggregate_invariant_under_weight_scaling():
    rng = np.random.default_rng(9)
    for _ in range(50):
        dims = ["a", "b", "c"]
        raw = {d: float(rng.uniform(0.1, 3)) for d in dims}
        scores = {d: int(rng.integers(0, 101)) for d in dims}
        lhs = aggregate_score(scores, WeightProfile(raw))
        rhs = aggregate_score(
            scores, WeightProfile({d: w * 8.0 for d, w in raw.items()})
        )
        assert lhs == rhs  # power-of-two scaling is exact


def test_parse_scores_identity_and_clamp():
    scores, flags = parse_scores({"design": 80, "domain": 100}, ["design", "domain"])
    assert scores == {"design": 80, "domain": 100}
    assert flags == ()
    scores, flags = parse_scores({"design": 120}, ["design"])
    assert scores == {"design": 100}
    assert flags == ("clamped:design",)


def test_parse_scores_missing_key_is_schema_failure():
    with pytest.raises(SchemaViolationError):
        parse_scores({"design": 80}, ["design", "domain"])
    with pytest.raises(SchemaViolationError):
        parse_scores({"design": "high", "domain": 3}, ["design", "domain"])


def test_prompt_lists_only_weighted_dimensions():
    dims = two_dims()
    weights = WeightProfile({"domain": 1.0, "design": 0.0})
    parts = build_rerank_prompt(
        "query text", dims, weights, "text", annotations={"domain": "a store"}
    )
    assert "domain" in parts.text
    assert "(id: design)" not in parts.text
    assert parts.image is None
    assert "query text" in parts.text


def test_prompt_image_mode_attaches_exactly_one_image():
    dims = two_dims()
    weights = WeightProfile({"domain": 1.0, "design": 1.0})
    parts = build_rerank_prompt("q", dims, weights, "image", image=b"\x01\x02")
    assert parts.image == b"\x01\x02"


def test_request_validation():
    weights = WeightProfile({"d": 1.0})
    model = ModelConfig(provider="stub", model="stub-chat")
    with pytest.raises(ValueError):
        RerankRequest(query="q", mode="video", weights=weights, model=model)
    with pytest.raises(ValueError):
        RerankRequest(query="q", mode="text", weights=weights, model=model, k=0)


# ---------------------------------------------------------------------------
# rerank


def rerank_request(weights, mode="text", **overrides):
    defaults = dict(
        query="a bright shopping screen",
        mode=mode,
        weights=weights,
        model=ModelConfig(provider="stub", model="stub-chat", max_retries=0),
        k=4,
    )
    defaults.update(overrides)
    return RerankRequest(**defaults)


def test_rerank_text_mode_scores_head_and_keeps_tail(tmp_path, gateway, embed_config):
    manifest, store, index, stage1, weights = make_stage1(tmp_path, gateway, embed_config)
    ranking = rerank(
        stage1, rerank_request(weights, k=4), manifest.dimensions, gateway, store=store
    )
    assert len(ranking.head) == 4
    assert len(ranking.tail) == 2
    head_ids = {score.gui_id for score in ranking.head}
    tail_ids = {entry.gui_id for entry in ranking.tail}
    assert head_ids.isdisjoint(tail_ids)
    aggregates = [score.aggregate for score in ranking.head]
    assert aggregates == sorted(aggregates, reverse=True)
    for score in ranking.head:
        assert set(score.scores) == set(manifest.dimensions.ids())
        assert all(0 <= value <= 100 for value in score.scores.values())
    assert ranking.meter.request_count == 4


def test_k_larger_than_corpus_means_empty_tail(tmp_path, gateway, embed_config):
    manifest, store, index, stage1, weights = make_stage1(tmp_path, gateway, embed_config)
    ranking = rerank(
        stage1, rerank_request(weights, k=50), manifest.dimensions, gateway, store=store
    )
    assert len(ranking.head) == len(manifest.guis)
    assert ranking.tail == []


def test_rerank_is_deterministic_across_repeats_and_widths(tmp_path, gateway, embed_config):
    manifest, store, index, stage1, weights = make_stage1(tmp_path, gateway, embed_config)
    outcomes = []
    for width, batch in ((1, 1), (4, 2), (10, 10), (4, 2)):
        ranking = rerank(
            stage1,
            rerank_request(weights, k=5, width=width, batch_size=batch),
            manifest.dimensions,
            gateway,
            store=store,
        )
        outcomes.append(
            (
                ranking.ordered_ids(),
                [score.scores for score in ranking.head],
                ranking.meter,
            )
        )
    assert all(outcome == outcomes[0] for outcome in outcomes[1:])


def test_rerank_image_mode_uses_screenshots(tmp_path, gateway, embed_config):
    manifest, store, index, stage1, weights = make_stage1(tmp_path, gateway, embed_config)
    text_ranking = rerank(
        stage1, rerank_request(weights, mode="text", k=4), manifest.dimensions,
        gateway, store=store,
    )
    image_ranking = rerank(
        stage1, rerank_request(weights, mode="image", k=4), manifest.dimensions,
        gateway, manifest=manifest,
    )
    assert len(image_ranking.head) == 4
    # Distinct inputs (images vs annotations) give distinct stub scores.
    assert [s.scores for s in image_ranking.head] != [s.scores for s in text_ranking.head]


def test_rerank_image_mode_requires_manifest(tmp_path, gateway, embed_config):
    manifest, store, index, stage1, weights = make_stage1(tmp_path, gateway, embed_config)
    with pytest.raises(ValueError, match="manifest"):
        rerank(stage1, rerank_request(weights, mode="image"), manifest.dimensions, gateway)


def test_rerank_text_mode_requires_complete_annotations(tmp_path, gateway, embed_config):
    manifest, store, index, stage1, weights = make_stage1(tmp_path, gateway, embed_config)
    gappy = store.reordered(store.gui_ids())
    head_gui = stage1.entries[0].gui_id
    gappy._by_gui[head_gui] = {"domain": "only domain"}
    with pytest.raises(ValueError, match=head_gui):
        rerank(stage1, rerank_request(weights), manifest.dimensions, gateway, store=gappy)


def test_failed_gui_gets_flagged_zero_scores(tmp_path, embed_config):
    from guiseek.providers import StubProvider

    class FailOnGui:
        name = "failing"
        supports_images = True
        supports_embeddings = True

        def __init__(self, marker):
            self.inner = StubProvider()
            self.marker = marker

        def complete(self, config, prompt, image, schema):
            if self.marker in prompt:
                raise TransportError("boom", meter=UsageMeter(request_count=1))
            return self.inner.complete(config, prompt, image, schema)

        def embed(self, config, texts):
            return self.inner.embed(config, texts)

    tmp = tmp_path
    base_gateway = Gateway(providers={"stub": StubProvider()}, sleep=lambda _t: None)
    manifest, store, index, stage1, weights = make_stage1(tmp, base_gateway, embed_config)
    victim = stage1.entries[1].gui_id
    marker = store.get(victim)["domain"]
    gateway = Gateway(providers={"stub": FailOnGui(marker)}, sleep=lambda _t: None)
    ranking = rerank(
        stage1, rerank_request(weights, k=4), manifest.dimensions, gateway, store=store
    )
    flagged = [score for score in ranking.head if score.flags == ("scoring_failed",)]
    assert [score.gui_id for score in flagged] == [victim]
    assert flagged[0].aggregate == 0.0
    assert all(value == 0 for value in flagged[0].scores.values())
    # Failed requests still account their usage.
    assert ranking.meter.request_count == 4


def test_provider_hard_down_aborts_instead_of_flagging_everything(tmp_path, embed_config):
    from guiseek.providers import StubProvider

    class DownProvider:
        name = "down"
        supports_images = True
        supports_embeddings = True

        def __init__(self):
            self.inner = StubProvider()

        def complete(self, config, prompt, image, schema):
            raise TransportError("outage", meter=UsageMeter(request_count=1))

        def embed(self, config, texts):
            return self.inner.embed(config, texts)

    healthy = Gateway(providers={"stub": StubProvider()}, sleep=lambda _t: None)
    manifest, store, index, stage1, weights = make_stage1(tmp_path, healthy, embed_config)
    down_gateway = Gateway(providers={"stub": DownProvider()}, sleep=lambda _t: None)
    with pytest.raises(TransportError, match="hard-down"):
        rerank(
            stage1, rerank_request(weights, k=4), manifest.dimensions,
            down_gateway, store=store,
        )


def test_head_ties_fall_back_to_stage1_total_then_id(tmp_path, gateway, embed_config):
    manifest, store, index, stage1, weights = make_stage1(tmp_path, gateway, embed_config)
    ranking = rerank(
        stage1, rerank_request(weights, k=4), manifest.dimensions, gateway, store=store
    )
    stage1_total = {e.gui_id: e.total for e in stage1.entries}
    keys = [
        (-score.aggregate, -stage1_total[score.gui_id], score.gui_id)
        for score in ranking.head
    ]
    assert keys == sorted(keys)
