"""Per-(GUI, dimension) unit-embedding index: build, persist, score.

Scoring is an exact full scan; at corpus scale (tens of thousands of
screens) dense dot products stay well within interactive latency, so no
approximate-nearest-neighbor structure is used.

Index file layout: 4-byte magic, u32 version, u32 header length, UTF-8
JSON header (dataset, embedding provider/model, vector width, dimension
records, gui id registry), then one row-major float32 matrix per
dimension in dimension-set order.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .datasets import AnnotationStore
from .dimensions import DimensionSet, SearchDimension
from .errors import IndexFormatError, IndexTruncatedError
from .gateway import Gateway, ModelConfig, UsageMeter

MAGIC = b"GSIX"
VERSION = 1
UNIT_NORM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class EmbeddingRecord:
    """One unit vector for a (gui, dimension) pair under a named model."""

    gui_id: str
    dimension_id: str
    vector: np.ndarray
    model: str


class EmbeddingIndex:
    """Immutable dense matrices, one per dimension, over a shared gui registry."""

    def __init__(
        self,
        dataset: str,
        provider: str,
        model: str,
        dimensions: DimensionSet,
        gui_ids: tuple[str, ...],
        matrices: dict[str, np.ndarray],
    ):
        if set(matrices) != set(dimensions.ids()):
            raise ValueError("matrices must cover exactly the dimension set")
        widths = {matrix.shape[1] for matrix in matrices.values()}
        if len(widths) != 1:
            raise ValueError(f"inconsistent vector widths: {sorted(widths)}")
        for dim_id, matrix in matrices.items():
            if matrix.shape[0] != len(gui_ids):
                raise ValueError(
                    f"dimension {dim_id!r}: {matrix.shape[0]} rows for "
                    f"{len(gui_ids)} GUIs"
                )
            if matrix.dtype != np.float32:
                raise ValueError(f"dimension {dim_id!r}: matrix must be float32")
            norms = np.linalg.norm(matrix.astype(np.float64), axis=1)
            if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOLERANCE):
                worst = float(np.max(np.abs(norms - 1.0)))
                raise ValueError(
                    f"dimension {dim_id!r}: rows deviate from unit norm by {worst}"
                )
        self.dataset = dataset
        self.provider = provider
        self.model = model
        self.dimensions = dimensions
        self.gui_ids = tuple(gui_ids)
        self._row_of = {gui_id: row for row, gui_id in enumerate(self.gui_ids)}
        self._matrices = {dim: matrix.copy() for dim, matrix in matrices.items()}
        for matrix in self._matrices.values():
            matrix.setflags(write=False)

    @property
    def width(self) -> int:
        return next(iter(self._matrices.values())).shape[1]

    def matrix(self, dimension_id: str) -> np.ndarray:
        try:
            return self._matrices[dimension_id]
        except KeyError:
            raise KeyError(f"unknown dimension {dimension_id!r}") from None

    def vector(self, gui_id: str, dimension_id: str) -> np.ndarray:
        return self.matrix(dimension_id)[self._row_of[gui_id]]

    def records(self) -> Iterator[EmbeddingRecord]:
        for dim_id in self.dimensions.ids():
            matrix = self._matrices[dim_id]
            for row, gui_id in enumerate(self.gui_ids):
                yield EmbeddingRecord(gui_id, dim_id, matrix[row], self.model)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingIndex):
            return NotImplemented
        return (
            self.dataset == other.dataset
            and self.provider == other.provider
            and self.model == other.model
            and self.dimensions == other.dimensions
            and self.gui_ids == other.gui_ids
            and all(
                np.array_equal(self._matrices[dim], other._matrices[dim])
                for dim in self.dimensions.ids()
            )
        )


def build_index(
    store: AnnotationStore,
    config: ModelConfig,
    gateway: Gateway,
    *,
    dataset: str = "",
    dimensions: DimensionSet | None = None,
    batch_size: int = 64,
) -> tuple[EmbeddingIndex, UsageMeter]:
    """Embed every (gui, dimension) annotation into a fresh index.

    The store must be complete for its dimension set; any embedding
    failure aborts the whole build since a partial index is invalid.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if dimensions is None:
        dimensions = DimensionSet(
            tuple(
                SearchDimension(id=dim_id, name=dim_id.replace("_", " "), description="")
                for dim_id in store.dimension_ids
            )
        )
    if dimensions.ids() != store.dimension_ids:
        raise ValueError(
            f"dimension set {list(dimensions.ids())} does not match store "
            f"dimensions {list(store.dimension_ids)}"
        )
    gui_ids = store.gui_ids()
    if not gui_ids:
        raise ValueError("annotation store is empty")
    incomplete = [gui_id for gui_id in gui_ids if not store.is_complete(gui_id)]
    if incomplete:
        raise ValueError(f"store incomplete for GUIs: {incomplete[:5]}")

    texts: list[str] = []
    for dim_id in dimensions.ids():
        for gui_id in gui_ids:
            texts.append(store.get(gui_id)[dim_id])

    vectors: list[np.ndarray] = []
    total = UsageMeter.zero()
    for start in range(0, len(texts), batch_size):
        batch, meter = gateway.embed_text(config, texts[start : start + batch_size])
        vectors.extend(batch)
        total = total.merge(meter)

    width = vectors[0].shape[0]
    matrices: dict[str, np.ndarray] = {}
    cursor = 0
    for dim_id in dimensions.ids():
        block = np.stack(vectors[cursor : cursor + len(gui_ids)]).astype(np.float32)
        # Renormalize after the float32 cast so stored rows are unit norm.
        block /= np.linalg.norm(block, axis=1, keepdims=True)
        matrices[dim_id] = block.reshape(len(gui_ids), width)
        cursor += len(gui_ids)

    index = EmbeddingIndex(
        dataset=dataset,
        provider=config.provider,
        model=config.model,
        dimensions=dimensions,
        gui_ids=gui_ids,
        matrices=matrices,
    )
    return index, total


def similarity(
    index: EmbeddingIndex, dimension_id: str, query: np.ndarray
) -> list[tuple[str, float]]:
    """Cosine of the query against every GUI, in registry order.

    Both sides are unit vectors, so cosine is a dot product.
    """
    query = np.asarray(query, dtype=np.float64)
    if query.ndim != 1 or query.shape[0] != index.width:
        raise ValueError(
            f"query must be a vector of width {index.width}, got shape {query.shape}"
        )
    if abs(float(np.linalg.norm(query)) - 1.0) > UNIT_NORM_TOLERANCE:
        raise ValueError("query vector must be unit-normalized")
    # einsum without optimization reduces every row in the same fixed order,
    # so equal rows score equal regardless of position (BLAS row blocking
    # does not guarantee that). float32 storage noise can still push a dot
    # product a hair past +/-1; cosine is mathematically bounded, so clip.
    scores = np.einsum(
        "ij,j->i", index.matrix(dimension_id).astype(np.float64), query,
        optimize=False,
    )
    scores = np.clip(scores, -1.0, 1.0)
    return list(zip(index.gui_ids, scores.tolist()))


def save_index(index: EmbeddingIndex, path: str | os.PathLike) -> None:
    header = {
        "dataset": index.dataset,
        "provider": index.provider,
        "model": index.model,
        "width": index.width,
        "dimensions": index.dimensions.to_records(),
        "gui_ids": list(index.gui_ids),
    }
    header_bytes = json.dumps(header, ensure_ascii=False, sort_keys=True).encode("utf-8")
    tmp = Path(str(path) + ".tmp")
    with tmp.open("wb") as handle:
        handle.write(MAGIC)
        handle.write(struct.pack("<II", VERSION, len(header_bytes)))
        handle.write(header_bytes)
        for dim_id in index.dimensions.ids():
            matrix = index.matrix(dim_id)
            handle.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())
    os.replace(tmp, path)


def load_index(path: str | os.PathLike) -> EmbeddingIndex:
    path = Path(path)
    if not path.is_file():
        raise IndexFormatError(f"index file not found: {path}")
    data = path.read_bytes()
    if len(data) < len(MAGIC) + 8:
        raise IndexTruncatedError(f"index file {path} is shorter than its header")
    if data[: len(MAGIC)] != MAGIC:
        raise IndexFormatError(
            f"index file {path} has bad magic {data[:len(MAGIC)]!r}, expected {MAGIC!r}"
        )
    version, header_len = struct.unpack_from("<II", data, len(MAGIC))
    if version != VERSION:
        raise IndexFormatError(
            f"index file {path}: unsupported version {version}, expected {VERSION}"
        )
    header_start = len(MAGIC) + 8
    header_end = header_start + header_len
    if len(data) < header_end:
        raise IndexTruncatedError(f"index file {path} truncated inside the header")
    try:
        header = json.loads(data[header_start:header_end].decode("utf-8"))
        dimensions = DimensionSet.from_records(header["dimensions"])
        gui_ids = tuple(header["gui_ids"])
        width = int(header["width"])
    except (json.JSONDecodeError, UnicodeDecodeError, KeyError, ValueError) as exc:
        raise IndexFormatError(f"index file {path}: bad header: {exc}") from exc

    matrix_bytes = len(gui_ids) * width * 4
    expected = header_end + matrix_bytes * len(dimensions)
    if len(data) < expected:
        raise IndexTruncatedError(
            f"index file {path} truncated: {len(data)} bytes, expected {expected}"
        )

    matrices: dict[str, np.ndarray] = {}
    offset = header_end
    for dim_id in dimensions.ids():
        block = np.frombuffer(
            data, dtype="<f4", count=len(gui_ids) * width, offset=offset
        )
        matrices[dim_id] = block.reshape(len(gui_ids), width).astype(np.float32)
        offset += matrix_bytes
    return EmbeddingIndex(
        dataset=header.get("dataset", ""),
        provider=header.get("provider", ""),
        model=header.get("model", ""),
        dimensions=dimensions,
        gui_ids=gui_ids,
        matrices=matrices,
    )
