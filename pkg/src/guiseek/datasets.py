"""Corpus data model: GUI records, dataset manifests, and annotation stores.

Manifest files are UTF-8 JSON with fields ``name``, ``image_dir``,
``dimensions`` and ``guis``. Annotation stores are line-delimited JSON,
one ``{"gui_id": ..., "annotations": {...}}`` object per GUI, written in
a canonical order so byte-level round-trips are stable.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from .dimensions import DimensionSet
from .errors import ManifestError, StoreError

logger = logging.getLogger(__name__)


@dataclass
class GuiRecord:
    """One corpus image plus its per-dimension text annotations."""

    gui_id: str
    image_path: str
    source: str = ""
    annotations: dict[str, str] = field(default_factory=dict)


@dataclass
class DatasetManifest:
    """Validated description of one image corpus.

    ``root`` is the directory the manifest was loaded from; it is runtime
    state used to resolve image paths and is not serialized.
    """

    name: str
    image_dir: str
    dimensions: DimensionSet
    guis: list[GuiRecord]
    embedding_model: str | None = None
    root: Path = field(default_factory=Path, compare=False)

    def image_file(self, record: GuiRecord) -> Path:
        return self.root / self.image_dir / record.image_path

    def get(self, gui_id: str) -> GuiRecord:
        for record in self.guis:
            if record.gui_id == gui_id:
                return record
        raise KeyError(f"unknown gui_id {gui_id!r}")

    def to_json(self) -> dict:
        doc = {
            "name": self.name,
            "image_dir": self.image_dir,
            "dimensions": self.dimensions.to_records(),
            "guis": [
                {"gui_id": rec.gui_id, "image_path": rec.image_path}
                for rec in self.guis
            ],
        }
        if self.embedding_model is not None:
            doc["embedding_model"] = self.embedding_model
        return doc


def load_manifest(path: str | os.PathLike) -> DatasetManifest:
    """Load and validate a manifest file.

    Raises ManifestError for a missing file, malformed record, duplicate
    gui_id, or dangling image path, naming the offending record.
    """
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"manifest file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from exc

    for key in ("name", "image_dir", "dimensions", "guis"):
        if key not in doc:
            raise ManifestError(f"manifest {path} is missing field {key!r}")
    try:
        dimensions = DimensionSet.from_records(doc["dimensions"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestError(f"manifest {path}: bad dimensions: {exc}") from exc

    root = path.parent
    image_root = root / doc["image_dir"]
    guis: list[GuiRecord] = []
    seen: set[str] = set()
    for idx, raw in enumerate(doc["guis"]):
        if not isinstance(raw, dict) or "gui_id" not in raw or "image_path" not in raw:
            raise ManifestError(
                f"manifest {path}: record {idx} is malformed "
                "(needs gui_id and image_path)"
            )
        gui_id = raw["gui_id"]
        if not gui_id or not isinstance(gui_id, str):
            raise ManifestError(f"manifest {path}: record {idx}: empty gui_id")
        if gui_id in seen:
            raise ManifestError(
                f"manifest {path}: record {idx}: duplicate gui_id {gui_id!r}"
            )
        seen.add(gui_id)
        image_path = raw["image_path"]
        if not (image_root / image_path).is_file():
            raise ManifestError(
                f"manifest {path}: record {idx}: image path {image_path!r} "
                "does not resolve to a readable file"
            )
        guis.append(GuiRecord(gui_id=gui_id, image_path=image_path, source=doc["name"]))

    return DatasetManifest(
        name=doc["name"],
        image_dir=doc["image_dir"],
        dimensions=dimensions,
        guis=guis,
        embedding_model=doc.get("embedding_model"),
        root=root,
    )


def save_manifest(manifest: DatasetManifest, path: str | os.PathLike) -> None:
    Path(path).write_text(
        json.dumps(manifest.to_json(), indent=2) + "\n", encoding="utf-8"
    )


class AnnotationStore:
    """Per-GUI annotation maps, keyed by gui_id, with a fixed dimension order.

    The store is an ordered mapping; ``save`` writes records in insertion
    order with annotation keys in dimension order, so save/load round-trips
    are byte-identical.
    """

    def __init__(self, dimension_ids: tuple[str, ...]):
        if not dimension_ids:
            raise ValueError("annotation store needs at least one dimension id")
        self.dimension_ids = tuple(dimension_ids)
        self._by_gui: dict[str, dict[str, str]] = {}

    def __len__(self) -> int:
        return len(self._by_gui)

    def __contains__(self, gui_id: str) -> bool:
        return gui_id in self._by_gui

    def gui_ids(self) -> tuple[str, ...]:
        return tuple(self._by_gui)

    def get(self, gui_id: str) -> dict[str, str]:
        return dict(self._by_gui[gui_id])

    def set(self, gui_id: str, annotations: dict[str, str]) -> None:
        unknown = set(annotations) - set(self.dimension_ids)
        if unknown:
            raise StoreError(
                f"gui {gui_id!r}: annotation keys {sorted(unknown)} are not in "
                f"the dimension set {list(self.dimension_ids)}"
            )
        self._by_gui[gui_id] = {
            dim: annotations[dim] for dim in self.dimension_ids if dim in annotations
        }

    def is_complete(self, gui_id: str) -> bool:
        entry = self._by_gui.get(gui_id)
        if entry is None:
            return False
        return all(entry.get(dim, "").strip() for dim in self.dimension_ids)

    def reordered(self, gui_order: list[str] | tuple[str, ...]) -> "AnnotationStore":
        """Copy of this store with records in the given gui order."""
        out = AnnotationStore(self.dimension_ids)
        for gui_id in gui_order:
            if gui_id in self._by_gui:
                out._by_gui[gui_id] = dict(self._by_gui[gui_id])
        for gui_id, entry in self._by_gui.items():
            if gui_id not in out._by_gui:
                out._by_gui[gui_id] = dict(entry)
        return out

    def record_line(self, gui_id: str) -> str:
        entry = self._by_gui[gui_id]
        ordered = {dim: entry[dim] for dim in self.dimension_ids if dim in entry}
        return json.dumps(
            {"gui_id": gui_id, "annotations": ordered}, ensure_ascii=False
        )

    def save(self, path: str | os.PathLike) -> None:
        tmp = Path(str(path) + ".tmp")
        with tmp.open("w", encoding="utf-8") as handle:
            for gui_id in self._by_gui:
                handle.write(self.record_line(gui_id) + "\n")
        os.replace(tmp, path)


def load_store(
    path: str | os.PathLike, dimensions: DimensionSet | None = None
) -> AnnotationStore:
    """Load an annotation store, deriving the dimension order if not given.

    Without an explicit dimension set the order comes from the first
    record's annotation keys; all records must then share that key set.
    Malformed lines raise StoreError naming the line number.
    """
    path = Path(path)
    if not path.is_file():
        raise StoreError(f"annotation store not found: {path}")

    records: list[tuple[str, dict[str, str]]] = []
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StoreError(
                    f"annotation store {path}: line {lineno} is not valid JSON "
                    f"(truncated or corrupt): {exc}"
                ) from exc
            if (
                not isinstance(obj, dict)
                or "gui_id" not in obj
                or not isinstance(obj.get("annotations"), dict)
            ):
                raise StoreError(
                    f"annotation store {path}: line {lineno} needs gui_id and "
                    "an annotations map"
                )
            records.append((obj["gui_id"], obj["annotations"]))

    if dimensions is not None:
        dimension_ids = dimensions.ids()
    elif records:
        dimension_ids = tuple(records[0][1].keys())
    else:
        raise StoreError(f"annotation store {path} is empty")

    store = AnnotationStore(dimension_ids)
    for lineno, (gui_id, annotations) in enumerate(records, start=1):
        extra = set(annotations) - set(dimension_ids)
        if extra:
            raise StoreError(
                f"annotation store {path}: line {lineno}: keys {sorted(extra)} "
                f"not in dimension set {list(dimension_ids)}"
            )
        # Later lines for the same gui win; incremental appends rely on this.
        store._by_gui[gui_id] = {
            dim: annotations[dim] for dim in dimension_ids if dim in annotations
        }
    return store


def append_store_line(
    path: str | os.PathLike, store: AnnotationStore, gui_id: str
) -> None:
    """Append one record so an interrupted run loses at most in-flight GUIs."""
    with Path(path).open("a", encoding="utf-8") as handle:
        handle.write(store.record_line(gui_id) + "\n")
        handle.flush()
