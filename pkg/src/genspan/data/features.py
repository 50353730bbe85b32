"""Binary feature file format.

Layout: magic "GSPF" (4 bytes), u32 version=1, u32 L, u32 d, then L*d
little-endian float32 values in row-major order. Writes are atomic
(temp file + rename) so concurrent readers never see partial files.
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

from ..errors import BadMagic, DimMismatch, IoFailure, ParseError, TruncatedPayload, VersionUnsupported
from .types import FeatureSequence

MAGIC = b"GSPF"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


def write_features(path, seq: FeatureSequence) -> None:
    """Persist a feature sequence; bit-exact round trip with read_features."""
    path = Path(path)
    payload = seq.array.astype("<f4", copy=False).tobytes()
    header = _HEADER.pack(MAGIC, VERSION, seq.length, seq.dim)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    try:
        tmp.write_bytes(header + payload)
        os.replace(tmp, path)
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_features(path) -> FeatureSequence:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if len(blob) < _HEADER.size:
        raise TruncatedPayload(f"{path}: {len(blob)} bytes is shorter than the header")
    magic, version, rows, cols = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise BadMagic(f"{path}: magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise VersionUnsupported(f"{path}: version {version}, supported: {VERSION}")
    if rows < 1 or cols < 1:
        raise ParseError(f"{path}: non-positive dims {rows}x{cols}")
    expected = rows * cols * 4
    body = blob[_HEADER.size:]
    if len(body) < expected:
        raise TruncatedPayload(f"{path}: payload {len(body)} bytes, header promises {expected}")
    if len(body) > expected:
        raise ParseError(f"{path}: {len(body) - expected} trailing bytes after payload")
    data = np.frombuffer(body, dtype="<f4").reshape(rows, cols)
    return FeatureSequence(data)
