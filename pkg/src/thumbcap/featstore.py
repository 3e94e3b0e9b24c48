"""Binary feature file ("TCFV") with a JSONL row manifest.

Layout: magic "TCFV", version u32, count u32, dim u32, then count*dim
row-major little-endian float32. The manifest (same path + ".manifest.jsonl")
maps row index -> youtube_id so external embedders can be swapped in.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from .errors import CorruptFeatureFile, VersionMismatch

MAGIC = b"TCFV"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


def manifest_path(path: Union[str, Path]) -> Path:
    return Path(str(path) + ".manifest.jsonl")


def write_features(path: Union[str, Path], ids: Sequence[str], matrix: np.ndarray) -> None:
    matrix = np.asarray(matrix, dtype=np.float32)
    if matrix.ndim != 2:
        raise ValueError("matrix must be 2-D (rows, dim)")
    if len(ids) != matrix.shape[0]:
        raise ValueError(f"{len(ids)} ids for {matrix.shape[0]} rows")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, matrix.shape[0], matrix.shape[1]))
        fh.write(np.ascontiguousarray(matrix).astype("<f4").tobytes())
    with open(manifest_path(path), "w", encoding="utf-8") as fh:
        for row, yid in enumerate(ids):
            fh.write(json.dumps({"row": row, "youtube_id": yid}, separators=(",", ":")))
            fh.write("\n")


def read_features(path: Union[str, Path]) -> Tuple[List[str], np.ndarray]:
    """Load (ids, float64 matrix). Raises on truncation or version drift."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise CorruptFeatureFile(f"{path}: shorter than header")
    magic, version, count, dim = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise CorruptFeatureFile(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise VersionMismatch(f"{path}: feature file version {version}, expected {VERSION}")
    expected = _HEADER.size + count * dim * 4
    if len(raw) != expected:
        raise CorruptFeatureFile(f"{path}: expected {expected} bytes, found {len(raw)}")
    matrix = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(count, dim)
    ids: List[str] = []
    mpath = manifest_path(path)
    if not mpath.exists():
        raise CorruptFeatureFile(f"{mpath}: manifest missing")
    with open(mpath, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh):
            obj = json.loads(line)
            if obj.get("row") != line_no:
                raise CorruptFeatureFile(f"{mpath}: row index mismatch at line {line_no + 1}")
            ids.append(obj["youtube_id"])
    if len(ids) != count:
        raise CorruptFeatureFile(f"{mpath}: {len(ids)} manifest rows for {count} feature rows")
    return ids, matrix.astype(np.float64)


def features_by_id(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    ids, matrix = read_features(path)
    return {yid: matrix[i] for i, yid in enumerate(ids)}
