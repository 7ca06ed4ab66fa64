"""Shared fixtures: tiny synthetic datasets and an offline gateway."""

from __future__ import annotations

import binascii
import json
import struct
import zlib
from pathlib import Path

import pytest

from guiseek.dimensions import default_dimension_set
from guiseek.gateway import Gateway, ModelConfig
from guiseek.providers import StubProvider


def tiny_png(marker: bytes = b"") -> bytes:
    """A valid 1x1 PNG; the marker is appended after IEND so files differ
    per GUI without any decoder caring."""

    def chunk(kind: bytes, data: bytes) -> bytes:
        return (
            struct.pack(">I", len(data))
            + kind
            + data
            + struct.pack(">I", binascii.crc32(kind + data))
        )

    signature = b"\x89PNG\r\n\x1a\n"
    ihdr = chunk(b"IHDR", struct.pack(">IIBBBBB", 1, 1, 8, 2, 0, 0, 0))
    idat = chunk(b"IDAT", zlib.compress(b"\x00\xff\x00\x00"))
    iend = chunk(b"IEND", b"")
    return signature + ihdr + idat + iend + marker


def write_dataset(root: Path, n: int = 10, name: str = "demo") -> dict[str, Path]:
    """Write a manifest plus n distinct images under ``root``."""
    images = root / "images"
    images.mkdir(parents=True, exist_ok=True)
    guis = []
    for i in range(n):
        gui_id = f"gui_{i:03d}"
        (images / f"{gui_id}.png").write_bytes(tiny_png(gui_id.encode()))
        guis.append({"gui_id": gui_id, "image_path": f"{gui_id}.png"})
    manifest_path = root / f"{name}.manifest.json"
    manifest_path.write_text(
        json.dumps(
            {
                "name": name,
                "image_dir": "images",
                "dimensions": default_dimension_set().to_records(),
                "guis": guis,
            },
            indent=2,
        ),
        encoding="utf-8",
    )
    return {"manifest": manifest_path, "images": images, "root": root}


@pytest.fixture
def dataset(tmp_path):
    return write_dataset(tmp_path, n=3)


@pytest.fixture
def stub_provider():
    return StubProvider()


@pytest.fixture
def gateway(stub_provider):
    return Gateway(providers={"stub": stub_provider}, sleep=lambda _t: None)


@pytest.fixture
def chat_config():
    return ModelConfig(provider="stub", model="stub-chat")


@pytest.fixture
def embed_config():
    return ModelConfig(provider="stub", model="stub-embed")
