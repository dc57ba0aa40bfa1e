"""Online triplet loss with hardest-violating-negative mining.

Candidates are all ordered same-identity (anchor, positive) pairs. For
each pair, the mined negative is the closest different-identity sample
whose distance to the anchor violates the margin condition
d(a, n) < d(a, p) + margin; pairs with no violator contribute nothing.
The loss averages the active contributions, and the gradient treats the
mined selection as fixed (subgradient through the argmin).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DegenerateBatch, DegenerateDistance, NoNegativesInBatch
from .sampler import TripletBatch


def batch_distances(embeddings: np.ndarray) -> np.ndarray:
    """Exact pairwise Euclidean distances within a batch."""
    x = np.asarray(embeddings, dtype=np.float64)
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt(np.einsum("ijd,ijd->ij", diff, diff))


def hardest_violating_negative(
    dist: np.ndarray,
    labels,
    anchor: int,
    positive: int,
    margin: float,
) -> Optional[int]:
    """Index of the closest margin-violating negative for (anchor, positive).

    Ties break toward the smaller index; returns None when no negative
    violates the margin condition.
    """
    anchor_label = labels[anchor]
    negatives = [j for j in range(len(labels)) if labels[j] != anchor_label]
    if not negatives:
        raise NoNegativesInBatch(f"batch contains only identity {anchor_label!r}")
    threshold = dist[anchor, positive] + margin
    best = None
    best_dist = np.inf
    for j in negatives:
        dij = dist[anchor, j]
        if dij < threshold and dij < best_dist:
            best = j
            best_dist = dij
    return best


@dataclass(frozen=True)
class MinedTriplet:
    anchor: int
    positive: int
    negative: int
    d_ap: float
    d_an: float


def mine_batch(batch: TripletBatch, margin: float) -> list[MinedTriplet]:
    """Enumerate all active (anchor, positive, hardest-negative) triplets."""
    labels = batch.labels
    if len(set(labels)) < 2:
        raise DegenerateBatch("triplet mining needs at least two identities in the batch")
    dist = batch_distances(batch.embeddings)
    mined = []
    n = len(labels)
    for a in range(n):
        for p in range(n):
            if p == a or labels[p] != labels[a]:
                continue
            neg = hardest_violating_negative(dist, labels, a, p, margin)
            if neg is None:
                continue
            mined.append(
                MinedTriplet(
                    anchor=a,
                    positive=p,
                    negative=neg,
                    d_ap=float(dist[a, p]),
                    d_an=float(dist[a, neg]),
                )
            )
    return mined


def triplet_loss(batch: TripletBatch, margin: float) -> tuple[float, int]:
    """Mean hinge over active triplets; zero when nothing violates."""
    mined = mine_batch(batch, margin)
    if not mined:
        return 0.0, 0
    contributions = [max(0.0, t.d_ap - t.d_an + margin) for t in mined]
    return sum(contributions) / len(mined), len(mined)


def loss_gradient(batch: TripletBatch, margin: float) -> np.ndarray:
    """Gradient of triplet_loss with respect to the batch embeddings."""
    x = batch.embeddings
    grad = np.zeros_like(x)
    mined = mine_batch(batch, margin)
    if not mined:
        return grad
    for t in mined:
        if t.d_ap == 0.0 or t.d_an == 0.0:
            raise DegenerateDistance(
                f"zero distance in active triplet ({t.anchor}, {t.positive}, {t.negative})"
            )
        ap_dir = (x[t.anchor] - x[t.positive]) / t.d_ap
        an_dir = (x[t.anchor] - x[t.negative]) / t.d_an
        grad[t.anchor] += ap_dir - an_dir
        grad[t.positive] -= ap_dir
        grad[t.negative] += an_dir
    grad /= len(mined)
    return grad


def verify_mined_triplets(batch: TripletBatch, margin: float) -> None:
    """Exhaustively re-check the mining rule for every mined triplet.

    Used by the test suite: every mined negative must differ in identity,
    violate the margin condition, and be minimal among in-batch negatives.
    """
    dist = batch_distances(batch.embeddings)
    labels = batch.labels
    for t in mine_batch(batch, margin):
        assert labels[t.negative] != labels[t.anchor]
        assert dist[t.anchor, t.negative] < dist[t.anchor, t.positive] + margin
        rivals = [
            dist[t.anchor, j]
            for j in range(len(labels))
            if labels[j] != labels[t.anchor]
        ]
        assert min(rivals) == dist[t.anchor, t.negative]
