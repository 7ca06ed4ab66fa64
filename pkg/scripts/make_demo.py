#!/usr/bin/env python3
"""Build a small stub-annotated demo dataset plus a service config.

Creates everything the HTTP service (and the web UI) needs to run fully
offline: synthetic screenshots, a manifest, a stub annotation store, an
embedding index, a price table, and service.json.

Usage: python3 scripts/make_demo.py [--out demo] [--guis 24]
"""

import argparse
import binascii
import json
import struct
import sys
import zlib
from pathlib import Path

from guiseek.annotator import AnnotationJob, annotate_dataset
from guiseek.datasets import load_manifest
from guiseek.dimensions import default_dimension_set
from guiseek.gateway import Gateway, ModelConfig
from guiseek.index import build_index, save_index
from guiseek.providers import StubProvider


def tiny_png(marker: bytes) -> bytes:
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
    return signature + ihdr + idat + chunk(b"IEND", b"") + marker


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo", type=Path)
    parser.add_argument("--guis", default=24, type=int)
    parser.add_argument("--port", default=8000, type=int)
    args = parser.parse_args()

    root = args.out
    images = root / "images"
    images.mkdir(parents=True, exist_ok=True)
    guis = []
    for i in range(args.guis):
        gui_id = f"gui_{i:03d}"
        (images / f"{gui_id}.png").write_bytes(tiny_png(gui_id.encode()))
        guis.append({"gui_id": gui_id, "image_path": f"{gui_id}.png"})
    manifest_path = root / "demo.manifest.json"
    manifest_path.write_text(
        json.dumps(
            {
                "name": "demo",
                "image_dir": "images",
                "dimensions": default_dimension_set().to_records(),
                "guis": guis,
            },
            indent=2,
        ),
        encoding="utf-8",
    )

    gateway = Gateway(providers={"stub": StubProvider()})
    manifest = load_manifest(manifest_path)
    store_path = root / "demo.annotations.jsonl"
    result = annotate_dataset(
        AnnotationJob(
            manifest=manifest,
            model=ModelConfig(provider="stub", model="stub-chat"),
            store_path=store_path,
        ),
        gateway,
    )
    index, _ = build_index(
        result.store,
        ModelConfig(provider="stub", model="stub-embed"),
        gateway,
        dataset="demo",
        dimensions=manifest.dimensions,
    )
    index_path = root / "demo.index"
    save_index(index, index_path)

    prices_path = root / "prices.json"
    prices_path.write_text(
        json.dumps(
            {
                "stub-chat": {"input_per_1m": 0.0, "output_per_1m": 0.0},
                "stub-embed": {"input_per_1m": 0.0, "output_per_1m": 0.0},
            },
            indent=2,
        ),
        encoding="utf-8",
    )
    service_path = root / "service.json"
    service_path.write_text(
        json.dumps(
            {
                "host": "127.0.0.1",
                "port": args.port,
                "cors_origins": ["*"],
                "price_table": "prices.json",
                "models": {
                    "decompose": {"provider": "stub", "model": "stub-chat"},
                    "rerank": {"provider": "stub", "model": "stub-chat"},
                },
                "datasets": {
                    "demo": {
                        "manifest": "demo.manifest.json",
                        "store": "demo.annotations.jsonl",
                        "index": "demo.index",
                    }
                },
            },
            indent=2,
        ),
        encoding="utf-8",
    )
    print(f"demo dataset ready under {root}/")
    print(f"serve it with: guiseek serve --config {service_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
