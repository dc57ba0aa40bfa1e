"""Core data model: embedding records, manifests, and corpus validation."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from ..errors import BadValue, DimMismatch, RowCountMismatch

SPLITS = ("train", "query", "gallery")
PROTOCOL_KINDS = ("market", "prcc_cc", "deepchange", "bts_templated")


@dataclass(frozen=True, eq=False)
class EmbeddingRecord:
    """One embedding vector plus the labels the protocols filter on.

    The vector is bound lazily: metadata readers produce stubs with
    vector=None and `bind_vectors` attaches read-only rows of the
    embedding matrix, keyed by record_id.
    """

    record_id: int
    identity: str
    media_id: str
    camera_id: str
    clothes_id: str
    dataset: str
    split: str
    vector: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.record_id < 0:
            raise BadValue(f"record_id must be non-negative, got {self.record_id}")
        if self.split not in SPLITS:
            raise BadValue(f"split must be one of {SPLITS}, got {self.split!r}")

    def metadata(self) -> dict:
        return {
            "record_id": self.record_id,
            "identity": self.identity,
            "media_id": self.media_id,
            "camera_id": self.camera_id,
            "clothes_id": self.clothes_id,
            "dataset": self.dataset,
            "split": self.split,
        }

    def __eq__(self, other):
        if not isinstance(other, EmbeddingRecord):
            return NotImplemented
        if self.metadata() != other.metadata():
            return False
        if self.vector is None or other.vector is None:
            return self.vector is None and other.vector is None
        return np.array_equal(self.vector, other.vector)

    def __hash__(self):
        return hash((self.record_id, self.identity, self.media_id))


@dataclass(frozen=True)
class Manifest:
    """A corpus of records partitioned into train/query/gallery splits."""

    records: tuple[EmbeddingRecord, ...]
    dim: int
    dataset_tags: frozenset[str] = field(default_factory=frozenset)
    protocol_hint: Optional[str] = None

    def __post_init__(self):
        if self.records and self.dim <= 0:
            raise BadValue(f"dim must be positive, got {self.dim}")
        if self.protocol_hint is not None and self.protocol_hint not in PROTOCOL_KINDS:
            raise BadValue(f"unknown protocol hint {self.protocol_hint!r}")
        seen = set()
        for rec in self.records:
            key = (rec.identity, rec.media_id, rec.record_id)
            if key in seen:
                raise BadValue(f"duplicate (identity, media_id, record_id) key {key}")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.records)

    def split(self, name: str) -> list[EmbeddingRecord]:
        if name not in SPLITS:
            raise BadValue(f"unknown split {name!r}")
        return [r for r in self.records if r.split == name]

    def identities(self, split: Optional[str] = None) -> list[str]:
        recs = self.records if split is None else self.split(split)
        return sorted({r.identity for r in recs})

    def matrix(self) -> np.ndarray:
        """Stack record vectors into an N x D float32 matrix (record order)."""
        if any(r.vector is None for r in self.records):
            raise BadValue("manifest contains unbound records; call bind_vectors first")
        if not self.records:
            return np.zeros((0, self.dim), dtype=np.float32)
        return np.stack([r.vector for r in self.records]).astype(np.float32, copy=False)


def build_manifest(
    records: Sequence[EmbeddingRecord],
    embeddings: Optional[np.ndarray] = None,
    dataset_tags: Optional[Iterable[str]] = None,
    protocol_hint: Optional[str] = None,
) -> Manifest:
    """Assemble a Manifest, optionally binding embedding rows to records.

    Records are ordered by record_id and each record_id must index a row
    of the embedding matrix.
    """
    ordered = sorted(records, key=lambda r: r.record_id)
    if embeddings is not None:
        if len(ordered) != embeddings.shape[0]:
            raise RowCountMismatch(
                f"{len(ordered)} metadata records vs {embeddings.shape[0]} embedding rows"
            )
        for pos, rec in enumerate(ordered):
            if rec.record_id != pos:
                raise RowCountMismatch(
                    f"record_id values are not a permutation of 0..{len(ordered) - 1}"
                )
        matrix = np.array(embeddings, dtype=np.float32, order="C", copy=True)
        matrix.setflags(write=False)
        ordered = [replace(r, vector=matrix[r.record_id]) for r in ordered]
        dim = matrix.shape[1]
    else:
        dims = {r.vector.shape[0] for r in ordered if r.vector is not None}
        if len(dims) > 1:
            raise DimMismatch(f"records carry mixed dimensions {sorted(dims)}")
        dim = dims.pop() if dims else 0
    tags = frozenset(dataset_tags) if dataset_tags is not None else frozenset(
        r.dataset for r in ordered
    )
    return Manifest(tuple(ordered), dim=dim, dataset_tags=tags, protocol_hint=protocol_hint)


@dataclass(frozen=True)
class ValidationReport:
    """Report-only corpus audit; never raises."""

    non_finite_records: tuple[int, ...] = ()
    dim_conflicts: tuple[str, ...] = ()
    blank_identities: tuple[int, ...] = ()
    unmatched_query_identities: tuple[str, ...] = ()
    num_records: int = 0

    @property
    def is_clean(self) -> bool:
        return not (
            self.non_finite_records
            or self.dim_conflicts
            or self.blank_identities
            or self.unmatched_query_identities
        )

    def summary(self) -> str:
        if self.is_clean:
            return f"clean ({self.num_records} records)"
        parts = []
        if self.non_finite_records:
            parts.append(f"non-finite rows: {list(self.non_finite_records)}")
        if self.dim_conflicts:
            parts.append(f"dimension conflicts: {list(self.dim_conflicts)}")
        if self.blank_identities:
            parts.append(f"blank identities at records: {list(self.blank_identities)}")
        if self.unmatched_query_identities:
            parts.append(
                f"query identities with no gallery rows: {list(self.unmatched_query_identities)}"
            )
        return "; ".join(parts)


def validate_corpus(manifest: Manifest, embeddings: np.ndarray) -> ValidationReport:
    """Audit a corpus for the defects evaluation would otherwise hit.

    Pure function of its inputs: repeated calls return identical reports.
    """
    dim_conflicts = []
    if embeddings.ndim != 2:
        dim_conflicts.append(f"embedding matrix is {embeddings.ndim}-dimensional")
    else:
        if embeddings.shape[0] != len(manifest.records):
            dim_conflicts.append(
                f"{embeddings.shape[0]} embedding rows vs {len(manifest.records)} records"
            )
        if manifest.records and embeddings.shape[1] != manifest.dim:
            dim_conflicts.append(
                f"matrix dim {embeddings.shape[1]} vs manifest dim {manifest.dim}"
            )

    non_finite = []
    if embeddings.ndim == 2:
        bad_rows = ~np.isfinite(embeddings).all(axis=1)
        non_finite = [int(i) for i in np.flatnonzero(bad_rows)]

    blank = [r.record_id for r in manifest.records if not r.identity.strip()]

    gallery_ids = {r.identity for r in manifest.records if r.split == "gallery"}
    unmatched = sorted(
        {
            r.identity
            for r in manifest.records
            if r.split == "query" and r.identity not in gallery_ids
        }
    )

    return ValidationReport(
        non_finite_records=tuple(non_finite),
        dim_conflicts=tuple(dim_conflicts),
        blank_identities=tuple(blank),
        unmatched_query_identities=tuple(unmatched),
        num_records=len(manifest.records),
    )
