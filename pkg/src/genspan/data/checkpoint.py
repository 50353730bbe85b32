"""Model checkpoint persistence.

Binary layout: magic "GSCK", u32 version, u32 param count, then per
parameter {u32 name length, UTF-8 name, u32 rank, u32 dims[rank],
payload float32 LE}. The model-config echo and the training step live in
a JSON sidecar next to the binary (<file>.meta.json) so the parameter
stream stays exactly the documented layout.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import (
    BadMagic,
    DimMismatch,
    IoFailure,
    NameMismatch,
    ParseError,
    TruncatedPayload,
    VersionUnsupported,
)

MAGIC = b"GSCK"
VERSION = 1


@dataclass
class Checkpoint:
    params: dict[str, np.ndarray]  # float32 arrays keyed by stable names
    config: dict
    step: int


def _meta_path(path: Path) -> Path:
    return path.with_name(path.name + ".meta.json")


def save_checkpoint(path, params, step: int, config: dict | None = None) -> None:
    """Write parameters (cast to float32) plus a step/config sidecar."""
    path = Path(path)
    chunks = [MAGIC, struct.pack("<II", VERSION, len(params))]
    for name, value in params.items():
        arr = np.asarray(value.data if hasattr(value, "data") else value, dtype="<f4")
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}I", *arr.shape) if arr.ndim else b"")
        chunks.append(arr.tobytes())
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    try:
        tmp.write_bytes(b"".join(chunks))
        os.replace(tmp, path)
        _meta_path(path).write_text(
            json.dumps({"step": int(step), "config": config or {}}, indent=2, sort_keys=True)
        )
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise IoFailure(f"cannot write checkpoint {path}: {exc}") from exc


def load_checkpoint(path) -> Checkpoint:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read checkpoint {path}: {exc}") from exc
    if blob[:4] != MAGIC:
        raise BadMagic(f"{path}: magic {blob[:4]!r}, expected {MAGIC!r}")
    if len(blob) < 12:
        raise TruncatedPayload(f"{path}: shorter than the fixed header")
    version, count = struct.unpack_from("<II", blob, 4)
    if version != VERSION:
        raise VersionUnsupported(f"{path}: version {version}, supported: {VERSION}")
    offset = 12
    params: dict[str, np.ndarray] = {}
    for _ in range(count):
        try:
            (name_len,) = struct.unpack_from("<I", blob, offset)
            offset += 4
            name = blob[offset:offset + name_len].decode("utf-8")
            offset += name_len
            (rank,) = struct.unpack_from("<I", blob, offset)
            offset += 4
            dims = struct.unpack_from(f"<{rank}I", blob, offset) if rank else ()
            offset += 4 * rank
            n = int(np.prod(dims)) if dims else 1
            payload = blob[offset:offset + 4 * n]
            if len(payload) < 4 * n:
                raise TruncatedPayload(f"{path}: parameter {name} payload truncated")
            offset += 4 * n
        except struct.error as exc:
            raise TruncatedPayload(f"{path}: parameter record truncated") from exc
        if name in params:
            raise ParseError(f"{path}: duplicate parameter name {name}")
        params[name] = np.frombuffer(payload, dtype="<f4").reshape(dims)
    if offset != len(blob):
        raise ParseError(f"{path}: {len(blob) - offset} trailing bytes")

    meta_file = _meta_path(path)
    step, config = 0, {}
    if meta_file.exists():
        try:
            meta = json.loads(meta_file.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"{meta_file}: unreadable sidecar: {exc}") from exc
        step = int(meta.get("step", 0))
        config = meta.get("config", {})
    return Checkpoint(params=params, config=config, step=step)


def check_param_names(checkpoint: Checkpoint, expected_names) -> None:
    """Reject loading into a model whose parameter set differs."""
    expected = set(expected_names)
    actual = set(checkpoint.params)
    if expected != actual:
        missing = sorted(expected - actual)
        extra = sorted(actual - expected)
        raise NameMismatch(f"checkpoint params differ: missing={missing} extra={extra}")


def load_into(checkpoint: Checkpoint, params) -> None:
    """Copy checkpoint values into live parameter tensors (engine dtype)."""
    check_param_names(checkpoint, params.keys())
    for name, tensor in params.items():
        stored = checkpoint.params[name]
        if tuple(stored.shape) != tuple(tensor.data.shape):
            raise DimMismatch(
                f"checkpoint param {name}: shape {stored.shape} vs model {tensor.data.shape}"
            )
        tensor.data = stored.astype(tensor.data.dtype)
