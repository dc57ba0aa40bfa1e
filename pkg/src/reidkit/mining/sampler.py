"""Identity-balanced batch sampling for online triplet mining."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BadValue, InsufficientIdentities
from ..corpus.records import Manifest


@dataclass(frozen=True)
class TripletBatch:
    """A P-identity, K-image batch ready for mining.

    embeddings are float64 (gradient math); labels align row-wise and
    provenance carries the source record ids.
    """

    embeddings: np.ndarray
    labels: tuple[str, ...]
    provenance: tuple[int, ...]

    def __post_init__(self):
        if self.embeddings.ndim != 2 or self.embeddings.shape[0] != len(self.labels):
            raise BadValue("embeddings and labels disagree on batch size")
        if len(self.provenance) != len(self.labels):
            raise BadValue("provenance and labels disagree on batch size")


def sample_batch(
    manifest: Manifest,
    num_identities: int,
    images_per_identity: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw P distinct train identities, K record positions each.

    Identities with fewer than K train images are sampled with
    replacement. Returns positions into manifest.records; deterministic
    given the generator state.
    """
    if num_identities < 1 or images_per_identity < 1:
        raise BadValue("P and K must be positive")
    by_identity: dict[str, list[int]] = {}
    for pos, rec in enumerate(manifest.records):
        if rec.split == "train":
            by_identity.setdefault(rec.identity, []).append(pos)
    identities = sorted(by_identity)
    if len(identities) < num_identities:
        raise InsufficientIdentities(
            f"need {num_identities} train identities, manifest has {len(identities)}"
        )
    chosen = rng.choice(len(identities), size=num_identities, replace=False)
    indices = []
    for ident_pos in chosen:
        pool = by_identity[identities[int(ident_pos)]]
        take = rng.choice(len(pool), size=images_per_identity, replace=len(pool) < images_per_identity)
        indices.extend(pool[int(t)] for t in take)
    return np.asarray(indices, dtype=np.int64)


def build_batch(manifest: Manifest, embeddings: np.ndarray, indices: np.ndarray) -> TripletBatch:
    """Materialize a TripletBatch from sampled record positions."""
    labels = tuple(manifest.records[int(i)].identity for i in indices)
    provenance = tuple(manifest.records[int(i)].record_id for i in indices)
    return TripletBatch(
        embeddings=np.asarray(embeddings, dtype=np.float64)[indices],
        labels=labels,
        provenance=provenance,
    )
