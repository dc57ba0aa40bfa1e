"""Bit-exact file ingestion for embedding containers and metadata.

Embedding container layout (magic "EMB1", encoder weights reuse it with
magic "ENC1"):

    bytes 0-3   ASCII magic
    bytes 4-7   uint32 little-endian row count N
    bytes 8-11  uint32 little-endian dimension D
    then exactly N*D*4 bytes of little-endian float32, row-major

Metadata is UTF-8 JSON lines, one flat object per record with keys
record_id, identity, media_id, camera_id, clothes_id, dataset, split.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..errors import (
    BadMagic,
    DimMismatch,
    DuplicateRecordId,
    MissingField,
    RowCountMismatch,
    TruncatedFile,
)
from .records import EmbeddingRecord, Manifest, build_manifest

EMBEDDING_MAGIC = b"EMB1"
ENCODER_MAGIC = b"ENC1"
_HEADER = struct.Struct("<4sII")

METADATA_FIELDS = (
    "record_id",
    "identity",
    "media_id",
    "camera_id",
    "clothes_id",
    "dataset",
    "split",
)


def write_embeddings(path, matrix: np.ndarray, magic: bytes = EMBEDDING_MAGIC) -> None:
    matrix = np.ascontiguousarray(matrix, dtype="<f4")
    if matrix.ndim != 2:
        raise DimMismatch(f"expected a 2-D matrix, got shape {matrix.shape}")
    n, d = matrix.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(magic, n, d))
        fh.write(matrix.tobytes(order="C"))


def read_embeddings(path, magic: bytes = EMBEDDING_MAGIC) -> np.ndarray:
    """Decode an embedding container; rejects short payloads and trailing bytes."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise TruncatedFile(f"{path}: {len(raw)} bytes is shorter than the 12-byte header")
    got_magic, n, d = _HEADER.unpack_from(raw, 0)
    if got_magic != magic:
        raise BadMagic(f"{path}: expected magic {magic!r}, found {got_magic!r}")
    expected = n * d * 4
    payload = len(raw) - _HEADER.size
    if payload < expected:
        raise TruncatedFile(
            f"{path}: header promises {expected} payload bytes, found {payload}"
        )
    if payload > expected:
        raise DimMismatch(
            f"{path}: {payload - expected} trailing bytes beyond the {expected}-byte payload"
        )
    matrix = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(n, d)
    return matrix.copy()


def write_metadata(path, records: Sequence[EmbeddingRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.metadata(), separators=(",", ":")) + "\n")


def read_metadata(path, expected_rows: Optional[int] = None) -> list[EmbeddingRecord]:
    """Parse metadata lines into record stubs (vector unbound).

    Returned records are sorted by record_id, which must form a
    permutation of 0..N-1 and, when expected_rows is given, match the
    embedding file's row count.
    """
    records = []
    seen_ids = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            for key in METADATA_FIELDS:
                if key not in obj:
                    raise MissingField(f"{path}:{lineno}: missing field {key!r}")
            rid = int(obj["record_id"])
            if rid in seen_ids:
                raise DuplicateRecordId(f"{path}:{lineno}: record_id {rid} repeated")
            seen_ids.add(rid)
            records.append(
                EmbeddingRecord(
                    record_id=rid,
                    identity=str(obj["identity"]),
                    media_id=str(obj["media_id"]),
                    camera_id=str(obj["camera_id"]),
                    clothes_id=str(obj["clothes_id"]),
                    dataset=str(obj["dataset"]),
                    split=str(obj["split"]),
                )
            )
    if expected_rows is not None and len(records) != expected_rows:
        raise RowCountMismatch(
            f"{path}: {len(records)} metadata records vs {expected_rows} embedding rows"
        )
    if seen_ids and seen_ids != set(range(len(records))):
        raise RowCountMismatch(
            f"{path}: record_id values are not a permutation of 0..{len(records) - 1}"
        )
    records.sort(key=lambda r: r.record_id)
    return records


def load_corpus(embeddings_path, metadata_path) -> Manifest:
    """Read both files and return a manifest with vectors bound."""
    matrix = read_embeddings(embeddings_path)
    records = read_metadata(metadata_path, expected_rows=matrix.shape[0])
    return build_manifest(records, embeddings=matrix)
