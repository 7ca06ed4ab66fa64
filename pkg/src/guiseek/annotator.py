"""Batch annotation of a GUI corpus across all search dimensions.

One model request per GUI covers every dimension at once, which keeps
request counts and cost at one call per screen. GUIs fan out over a
bounded worker pool; the store file is appended under a lock as results
land, so an interrupted run loses at most the in-flight screens, and a
clean run ends with a canonical rewrite in manifest order.
"""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

from .datasets import AnnotationStore, DatasetManifest, append_store_line, load_store
from .dimensions import DimensionSet
from .errors import AnnotationError, GatewayError
from .gateway import Gateway, ModelConfig, UsageMeter
from .schemas import StringMapSchema

logger = logging.getLogger(__name__)

ANNOTATION_WORD_CAP = 120
DEFAULT_FAILURE_THRESHOLD = 0.10


@dataclass
class AnnotationJob:
    manifest: DatasetManifest
    model: ModelConfig
    store_path: Path
    dimensions: DimensionSet | None = None
    width: int = 4
    resume: bool = False
    failure_threshold: float = DEFAULT_FAILURE_THRESHOLD

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("concurrency width must be >= 1")
        if self.dimensions is None:
            self.dimensions = self.manifest.dimensions


@dataclass(frozen=True)
class AnnotationFailure:
    gui_id: str
    error: str


@dataclass
class AnnotationResult:
    store: AnnotationStore
    meter: UsageMeter
    failures: list[AnnotationFailure] = field(default_factory=list)


def build_annotation_prompt(dimensions: DimensionSet) -> str:
    """Prompt asking for one description per dimension, JSON keyed by id."""
    lines = [
        "Describe the attached GUI screenshot along each search dimension",
        "listed below. Mention only what is visible on the screen and write",
        f"at most {ANNOTATION_WORD_CAP} words per dimension.",
        "",
        "Search dimensions:",
    ]
    for dim in dimensions:
        lines.append(f"- {dim.name} (id: {dim.id}): {dim.description}")
    return "\n".join(lines)


def annotate_dataset(job: AnnotationJob, gateway: Gateway) -> AnnotationResult:
    """Annotate every GUI in the manifest, resuming and fanning out as configured.

    Per-GUI failures after gateway retries are collected rather than
    aborting the batch; the run raises AnnotationError only when the
    failure rate over attempted GUIs exceeds the job threshold.
    """
    dimensions = job.dimensions
    assert dimensions is not None
    prompt = build_annotation_prompt(dimensions)
    schema = StringMapSchema(keys=dimensions.ids())

    if job.resume and job.store_path.is_file():
        store = load_store(job.store_path, dimensions)
    else:
        store = AnnotationStore(dimensions.ids())
        job.store_path.write_text("", encoding="utf-8")

    pending = [
        record
        for record in job.manifest.guis
        if not (job.resume and store.is_complete(record.gui_id))
    ]

    lock = threading.Lock()
    meters: list[UsageMeter] = []
    failures: list[AnnotationFailure] = []

    def annotate_one(record):
        image = job.manifest.image_file(record).read_bytes()
        annotations, meter = gateway.complete_with_image(
            job.model, prompt, image, schema
        )
        return record.gui_id, annotations, meter

    if pending:
        with ThreadPoolExecutor(max_workers=job.width) as pool:
            futures = {
                pool.submit(annotate_one, record): record for record in pending
            }
            for future in as_completed(futures):
                record = futures[future]
                try:
                    gui_id, annotations, meter = future.result()
                except GatewayError as exc:
                    with lock:
                        if exc.meter is not None:
                            meters.append(exc.meter)
                        failures.append(
                            AnnotationFailure(gui_id=record.gui_id, error=str(exc))
                        )
                    logger.warning("annotation failed for %s: %s", record.gui_id, exc)
                    continue
                with lock:
                    meters.append(meter)
                    store.set(gui_id, annotations)
                    append_store_line(job.store_path, store, gui_id)

    total_meter = UsageMeter.merge_all(meters)
    if pending and len(failures) / len(pending) > job.failure_threshold:
        raise AnnotationError(
            f"{len(failures)} of {len(pending)} GUIs failed annotation, above "
            f"the {job.failure_threshold:.0%} threshold",
            failures=failures,
        )

    # Canonical rewrite: manifest order, deduplicated, atomic.
    ordered = store.reordered([record.gui_id for record in job.manifest.guis])
    ordered.save(job.store_path)
    return AnnotationResult(store=ordered, meter=total_meter, failures=failures)
