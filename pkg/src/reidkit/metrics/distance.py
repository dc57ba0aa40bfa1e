"""Dense query-by-gallery distance computation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..errors import BadValue, DimMismatch, NonFiniteInput, ZeroVector

METRICS = ("euclidean", "cosine_distance")

# cap on the Q*G*D scratch block used per chunk (float64 elements)
_CHUNK_BUDGET = 4_000_000


@dataclass(frozen=True)
class DistanceMatrix:
    values: np.ndarray  # Q x G, float64, finite and >= 0
    metric: str
    query_ids: tuple[str, ...]
    gallery_ids: tuple[str, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def pairwise_distances(
    queries: np.ndarray,
    gallery: np.ndarray,
    metric: str = "euclidean",
    query_ids: Optional[Sequence[str]] = None,
    gallery_ids: Optional[Sequence[str]] = None,
) -> DistanceMatrix:
    """Compute all query-gallery distances under the chosen metric.

    Euclidean distances come from exact per-pair differences (chunked to
    bound memory), so self-distance is exactly zero. cosine_distance is
    1 - cosine similarity, clipped into [0, 2].
    """
    if metric not in METRICS:
        raise BadValue(f"unknown metric {metric!r}; expected one of {METRICS}")
    q = np.asarray(queries, dtype=np.float64)
    g = np.asarray(gallery, dtype=np.float64)
    if q.ndim != 2 or g.ndim != 2:
        raise DimMismatch(f"expected 2-D matrices, got shapes {q.shape} and {g.shape}")
    if q.shape[1] != g.shape[1]:
        raise DimMismatch(f"dimension mismatch: queries D={q.shape[1]}, gallery D={g.shape[1]}")
    if not (np.isfinite(q).all() and np.isfinite(g).all()):
        raise NonFiniteInput("inputs contain NaN or Inf entries")

    if metric == "euclidean":
        values = _euclidean(q, g)
    else:
        values = _cosine_distance(q, g)

    qids = tuple(query_ids) if query_ids is not None else tuple(str(i) for i in range(len(q)))
    gids = tuple(gallery_ids) if gallery_ids is not None else tuple(str(j) for j in range(len(g)))
    if len(qids) != q.shape[0] or len(gids) != g.shape[0]:
        raise DimMismatch("label lists do not match matrix shapes")
    return DistanceMatrix(values=values, metric=metric, query_ids=qids, gallery_ids=gids)


def _euclidean(q: np.ndarray, g: np.ndarray) -> np.ndarray:
    nq, d = q.shape
    ng = g.shape[0]
    out = np.empty((nq, ng))
    step = max(1, _CHUNK_BUDGET // max(1, ng * d))
    for start in range(0, nq, step):
        block = q[start : start + step, None, :] - g[None, :, :]
        out[start : start + step] = np.sqrt(np.einsum("qgd,qgd->qg", block, block))
    return out


def _cosine_distance(q: np.ndarray, g: np.ndarray) -> np.ndarray:
    qn = np.linalg.norm(q, axis=1)
    gn = np.linalg.norm(g, axis=1)
    if (qn == 0).any() or (gn == 0).any():
        raise ZeroVector("cosine distance is undefined for zero vectors")
    sims = (q / qn[:, None]) @ (g / gn[:, None]).T
    return np.clip(1.0 - sims, 0.0, 2.0)
