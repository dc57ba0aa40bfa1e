"""Seeded synthetic embedding corpora with a clothes-change structure.

Each identity gets an isotropic Gaussian cluster center; each clothes set
adds an offset confined to the trailing half of the dimensions (the
"appearance" subspace), and every image adds isotropic noise. Keeping the
offsets inside a fixed subspace makes cross-clothes retrieval strictly
harder than same-clothes retrieval while leaving the task solvable by a
linear encoder, which the training loop relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BadValue
from .records import EmbeddingRecord, Manifest, build_manifest


@dataclass(frozen=True)
class SynthConfig:
    num_identities: int
    clothes_sets_per_identity: int = 2
    images_per_clothes_set: int = 4
    dim: int = 32
    identity_separation: float = 1.0
    clothes_offset_scale: float = 0.0
    noise_scale: float = 0.0
    seed: int = 0
    # plumbing knobs, not part of the generative model
    holdout_fraction: float = 0.5
    num_cameras: int = 4
    dataset_tag: str = "synth"

    def validate(self) -> "SynthConfig":
        if self.num_identities < 1:
            raise BadValue("num_identities must be >= 1")
        if self.clothes_sets_per_identity < 2:
            raise BadValue("clothes_sets_per_identity must be >= 2")
        if self.images_per_clothes_set < 1:
            raise BadValue("images_per_clothes_set must be >= 1")
        if self.dim < 1:
            raise BadValue("dim must be >= 1")
        if self.identity_separation <= 0:
            raise BadValue("identity_separation must be positive")
        if self.clothes_offset_scale < 0 or self.noise_scale < 0:
            raise BadValue("scales must be non-negative")
        if not 0.0 <= self.holdout_fraction <= 1.0:
            raise BadValue("holdout_fraction must lie in [0, 1]")
        if self.num_cameras < 1:
            raise BadValue("num_cameras must be >= 1")
        if self.seed < 0 or self.seed >= 2**64:
            raise BadValue("seed must fit in 64 unsigned bits")
        return self


def synth_corpus(config: SynthConfig) -> tuple[Manifest, np.ndarray]:
    """Generate a corpus deterministically from the config seed.

    Identities are partitioned into a train block and a held-out block
    (holdout_fraction). Held-out images are split per clothes set into
    query (first quarter, at least one) and gallery rows, so both
    same-clothes and cross-clothes gallery matches exist; train
    identities carry split="train" on every image.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    n_ids = config.num_identities
    n_sets = config.clothes_sets_per_identity
    n_imgs = config.images_per_clothes_set
    dim = config.dim
    appearance_start = (dim + 1) // 2  # trailing floor(D/2) dims carry clothes offsets

    centers = config.identity_separation * rng.standard_normal((n_ids, dim))
    offsets = np.zeros((n_ids, n_sets, dim))
    offsets[:, :, appearance_start:] = config.clothes_offset_scale * rng.standard_normal(
        (n_ids, n_sets, dim - appearance_start)
    )
    total = n_ids * n_sets * n_imgs
    noise = config.noise_scale * rng.standard_normal((total, dim))

    n_holdout = int(round(n_ids * config.holdout_fraction))
    n_train = n_ids - n_holdout
    n_query = max(1, n_imgs // 4)

    records = []
    vectors = np.empty((total, dim))
    row = 0
    for ident_idx in range(n_ids):
        identity = f"id{ident_idx:05d}"
        for set_idx in range(n_sets):
            clothes = f"c{set_idx}"
            for img_idx in range(n_imgs):
                if ident_idx < n_train:
                    split = "train"
                elif n_imgs == 1:
                    split = "query" if set_idx == 0 else "gallery"
                else:
                    split = "query" if img_idx < n_query else "gallery"
                vectors[row] = centers[ident_idx] + offsets[ident_idx, set_idx] + noise[row]
                records.append(
                    EmbeddingRecord(
                        record_id=row,
                        identity=identity,
                        media_id=f"{identity}.{clothes}",
                        camera_id=f"cam{(img_idx + set_idx) % config.num_cameras}",
                        clothes_id=clothes,
                        dataset=config.dataset_tag,
                        split=split,
                    )
                )
                row += 1

    matrix = vectors.astype(np.float32)
    manifest = build_manifest(records, embeddings=matrix, dataset_tags={config.dataset_tag})
    return manifest, matrix
