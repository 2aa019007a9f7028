"""Portable checkpoint container for the collaborative model + binarization head.

Layout: a fixed-size header (magic "BINRECKP", version, n_users, n_items, d,
tau) followed by four little-endian float32 arrays in row-major order:
user_table, item_table, W, b. A JSON sidecar at "<path>.json" carries the
training configuration and final metrics.
"""

from __future__ import annotations

import dataclasses
import json
import struct
from pathlib import Path

import numpy as np

from .collab import BinarizationHead, CollabModel, TrainConfig
from .errors import DataError

MAGIC = b"BINRECKP"
VERSION = 1
_HEADER = struct.Struct("<8sIQQId")


def save_checkpoint(
    path: str | Path,
    model: CollabModel,
    head: BinarizationHead,
    tau: float,
    config: TrainConfig | None = None,
    metrics: dict | None = None,
) -> None:
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, model.n_users, model.n_items, model.d, tau))
        for arr in (model.user_table, model.item_table, head.W, head.b):
            fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    sidecar = {
        "config": dataclasses.asdict(config) if config is not None else None,
        "metrics": metrics or {},
    }
    with open(path.with_name(path.name + ".json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_checkpoint(path: str | Path) -> tuple[CollabModel, BinarizationHead, float, dict]:
    """Returns (model, head, tau, sidecar). Arrays come back as float64."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise DataError(f"checkpoint too short: {path}")
    magic, version, n_users, n_items, d, tau = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise DataError(f"bad checkpoint magic in {path}: {magic!r}")
    if version != VERSION:
        raise DataError(f"unsupported checkpoint version {version} in {path}")
    sizes = [n_users * d, n_items * d, d * d, d]
    expected = _HEADER.size + 4 * sum(sizes)
    if len(raw) != expected:
        raise DataError(f"checkpoint {path} has {len(raw)} bytes, expected {expected}")
    offset = _HEADER.size
    arrays = []
    for size in sizes:
        arrays.append(np.frombuffer(raw, dtype="<f4", count=size, offset=offset).astype(np.float64))
        offset += 4 * size
    model = CollabModel(
        user_table=arrays[0].reshape(n_users, d),
        item_table=arrays[1].reshape(n_items, d),
    )
    head = BinarizationHead(W=arrays[2].reshape(d, d), b=arrays[3])
    sidecar_path = path.with_name(path.name + ".json")
    sidecar = {}
    if sidecar_path.is_file():
        sidecar = json.loads(sidecar_path.read_text(encoding="utf-8"))
    return model, head, float(tau), sidecar
