"""Two-stage natural-language search over GUI screenshot repositories.

Stage 1 scores every screen with constrained embedding similarity over
customizable search dimensions; stage 2 reranks the top-k with a
multimodal model in text or image mode. Includes an evaluation harness
with the standard ranking metrics and token-cost accounting.
"""

from .annotator import AnnotationJob, AnnotationResult, annotate_dataset, build_annotation_prompt
from .datasets import (
    AnnotationStore,
    DatasetManifest,
    GuiRecord,
    load_manifest,
    load_store,
    save_manifest,
)
from .dimensions import DimensionSet, SearchDimension, default_dimension_set
from .errors import GuiseekError
from .evaluation import (
    GoldQuery,
    GoldStandard,
    MetricReport,
    average_precision,
    evaluate_run,
    hits_at,
    load_gold,
    ndcg_at,
    precision_at,
    project_cost,
    reciprocal_rank,
)
from .gateway import Gateway, ModelConfig, PriceTable, UsageMeter, cost_of, stub_config
from .index import EmbeddingIndex, build_index, load_index, save_index, similarity
from .reranker import FinalRanking, RerankRequest, RerankScore, rerank
from .retrieval import (
    DecomposedQuery,
    StageOneResult,
    WeightProfile,
    decompose_query,
    stage_one_rank,
)

__version__ = "0.1.0"
