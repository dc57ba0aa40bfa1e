"""Evaluation protocol construction: valid-match masks and templating.

Protocol semantics, per benchmark convention:

  market        same-identity gallery rows from the query's camera are
                invalid (cross-camera matching only).
  prcc_cc       same-identity gallery rows sharing the query's clothes set
                are invalid, so only cross-clothes matches count.
  deepchange    per-image gallery, cross-camera rule as market, never
                templated.
  bts_templated gallery collapsed to one embedding per identity; queries
                templated by a configurable grouping key (media by
                default); every gallery entry is valid.

Queries left with zero valid matches are excluded from scoring and
counted, never scored as failures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

from ..errors import BadValue, EmptyGallery, EmptyGroup, ZeroVector
from ..corpus.records import Manifest, PROTOCOL_KINDS

DEFAULT_RANKS = (1, 20)
DEFAULT_FAR_TARGETS = (1e-3, 1e-4)
TEMPLATE_KEYS = ("identity", "media")


@dataclass(frozen=True)
class EvalProtocol:
    kind: str
    ranks: tuple[int, ...] = DEFAULT_RANKS
    far_targets: tuple[float, ...] = DEFAULT_FAR_TARGETS
    template_gallery: bool = False
    template_queries: bool = False
    query_template_key: str = "media"

    def __post_init__(self):
        if self.kind not in PROTOCOL_KINDS:
            raise BadValue(f"unknown protocol kind {self.kind!r}")
        if not self.ranks or any(r < 1 for r in self.ranks):
            raise BadValue("ranks must be positive integers")
        if list(self.ranks) != sorted(self.ranks):
            raise BadValue("ranks must be sorted ascending")
        if not self.far_targets or any(not (0 < f < 1) for f in self.far_targets):
            raise BadValue("far targets must lie in (0, 1)")
        if list(self.far_targets) != sorted(self.far_targets, reverse=True):
            raise BadValue("far targets must be sorted descending")
        if self.query_template_key not in TEMPLATE_KEYS:
            raise BadValue(f"query template key must be one of {TEMPLATE_KEYS}")


def protocol_for(kind: str, **overrides) -> EvalProtocol:
    """Build the default protocol for a benchmark kind."""
    if kind == "bts_templated":
        base = dict(kind=kind, template_gallery=True, template_queries=True)
    else:
        base = dict(kind=kind)
    base.update(overrides)
    return EvalProtocol(**base)


@dataclass(frozen=True)
class EvalUnit:
    """One scoring unit: a single record or a templated group of records."""

    indices: tuple[int, ...]  # positions into manifest.records
    identity: str
    camera_id: Optional[str] = None
    clothes_id: Optional[str] = None


@dataclass(frozen=True)
class ProtocolArrangement:
    queries: tuple[EvalUnit, ...]
    gallery: tuple[EvalUnit, ...]
    valid_mask: np.ndarray  # Q x G bool
    match_mask: np.ndarray  # Q x G bool, subset of valid_mask
    evaluable: np.ndarray  # Q bool: query has >= 1 valid match

    @property
    def num_queries_skipped(self) -> int:
        return int((~self.evaluable).sum())

    @property
    def num_queries_evaluated(self) -> int:
        return int(self.evaluable.sum())


def _record_units(manifest: Manifest, split: str) -> list[EvalUnit]:
    units = []
    for pos, rec in enumerate(manifest.records):
        if rec.split == split:
            units.append(
                EvalUnit(
                    indices=(pos,),
                    identity=rec.identity,
                    camera_id=rec.camera_id,
                    clothes_id=rec.clothes_id,
                )
            )
    return units


def _grouped_units(manifest: Manifest, split: str, key: str) -> list[EvalUnit]:
    groups: dict[tuple, list[int]] = {}
    for pos, rec in enumerate(manifest.records):
        if rec.split != split:
            continue
        gkey = (rec.identity,) if key == "identity" else (rec.identity, rec.media_id)
        groups.setdefault(gkey, []).append(pos)
    units = []
    for gkey in sorted(groups):
        units.append(EvalUnit(indices=tuple(groups[gkey]), identity=gkey[0]))
    return units


def apply_protocol(manifest: Manifest, protocol: EvalProtocol) -> ProtocolArrangement:
    """Build query/gallery units and the valid/match masks for a protocol."""
    if protocol.template_gallery:
        gallery = _grouped_units(manifest, "gallery", "identity")
    else:
        gallery = _record_units(manifest, "gallery")
    if protocol.template_queries:
        queries = _grouped_units(manifest, "query", protocol.query_template_key)
    else:
        queries = _record_units(manifest, "query")
    if not gallery:
        raise EmptyGallery("manifest has no gallery rows")

    q_ident = np.array([u.identity for u in queries], dtype=object)
    g_ident = np.array([u.identity for u in gallery], dtype=object)
    same_identity = q_ident[:, None] == g_ident[None, :]

    if protocol.kind in ("market", "deepchange") and not (
        protocol.template_gallery or protocol.template_queries
    ):
        q_cam = np.array([u.camera_id for u in queries], dtype=object)
        g_cam = np.array([u.camera_id for u in gallery], dtype=object)
        valid = ~(same_identity & (q_cam[:, None] == g_cam[None, :]))
    elif protocol.kind == "prcc_cc" and not (
        protocol.template_gallery or protocol.template_queries
    ):
        q_clo = np.array([u.clothes_id for u in queries], dtype=object)
        g_clo = np.array([u.clothes_id for u in gallery], dtype=object)
        valid = ~(same_identity & (q_clo[:, None] == g_clo[None, :]))
    else:
        # templated protocols merge camera/clothes labels away
        valid = np.ones(same_identity.shape, dtype=bool)

    match = same_identity & valid
    evaluable = match.any(axis=1) if len(queries) else np.zeros(0, dtype=bool)
    return ProtocolArrangement(
        queries=tuple(queries),
        gallery=tuple(gallery),
        valid_mask=valid,
        match_mask=match,
        evaluable=evaluable,
    )


def template_vectors(members: np.ndarray) -> np.ndarray:
    """Aggregate one group: L2-normalize members, average, renormalize."""
    members = np.asarray(members, dtype=np.float64)
    if members.ndim != 2 or members.shape[0] == 0:
        raise EmptyGroup("template group must contain at least one vector")
    norms = np.linalg.norm(members, axis=1)
    if (norms == 0).any():
        raise ZeroVector("template group contains a zero-norm member")
    mean = (members / norms[:, None]).mean(axis=0)
    scale = np.linalg.norm(mean)
    if scale == 0:
        raise ZeroVector("normalized members cancel out; template undefined")
    return mean / scale


def template_embeddings(groups: Mapping[object, np.ndarray]) -> dict[object, np.ndarray]:
    """Template every group (key -> members matrix) to one unit vector each."""
    return {key: template_vectors(members) for key, members in groups.items()}


def unit_vectors(
    units: Iterable[EvalUnit], embeddings: np.ndarray, normalize: bool
) -> np.ndarray:
    """Materialize one row per unit: the record vector or the group template."""
    rows = []
    for unit in units:
        if len(unit.indices) == 1 and not normalize:
            rows.append(np.asarray(embeddings[unit.indices[0]], dtype=np.float64))
        elif len(unit.indices) == 1:
            vec = np.asarray(embeddings[unit.indices[0]], dtype=np.float64)
            norm = np.linalg.norm(vec)
            if norm == 0:
                raise ZeroVector(f"record {unit.indices[0]} has a zero vector")
            rows.append(vec / norm)
        else:
            rows.append(template_vectors(embeddings[list(unit.indices)]))
    return np.stack(rows) if rows else np.zeros((0, embeddings.shape[1]))
