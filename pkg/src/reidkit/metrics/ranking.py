"""CMC rank-k accuracy and mean average precision over masked galleries.

Ranking sorts valid gallery entries by ascending distance with ties broken
by ascending gallery index (numpy stable sort), which keeps every metric
deterministic across platforms and worker counts.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from ..errors import NoEvaluableQueries
from .distance import DistanceMatrix


def _as_values(dist: Union[DistanceMatrix, np.ndarray]) -> np.ndarray:
    if isinstance(dist, DistanceMatrix):
        return dist.values
    return np.asarray(dist, dtype=np.float64)


def first_match_positions(
    dist: Union[DistanceMatrix, np.ndarray],
    match_mask: np.ndarray,
    valid_mask: np.ndarray,
) -> np.ndarray:
    """1-based sorted position of each query's first valid match.

    Queries with no valid match get position 0 (callers treat them as
    skipped).
    """
    values = _as_values(dist)
    nq = values.shape[0]
    positions = np.zeros(nq, dtype=np.int64)
    for qi in range(nq):
        order = np.argsort(values[qi], kind="stable")
        keep = valid_mask[qi][order]
        hits = match_mask[qi][order][keep]
        where = np.flatnonzero(hits)
        if where.size:
            positions[qi] = int(where[0]) + 1
    return positions


def average_precisions(
    dist: Union[DistanceMatrix, np.ndarray],
    match_mask: np.ndarray,
    valid_mask: np.ndarray,
) -> np.ndarray:
    """Per-query average precision; NaN for queries with no valid match.

    AP = (1/R) * sum over relevant positions r of precision@r, computed on
    the valid-only ranking.
    """
    values = _as_values(dist)
    nq = values.shape[0]
    out = np.full(nq, np.nan)
    for qi in range(nq):
        order = np.argsort(values[qi], kind="stable")
        keep = valid_mask[qi][order]
        hits = match_mask[qi][order][keep]
        rel = np.flatnonzero(hits)
        if rel.size == 0:
            continue
        ranks = rel + 1.0
        precision_at_hits = np.arange(1, rel.size + 1) / ranks
        out[qi] = precision_at_hits.sum() / rel.size
    return out


def cmc(
    dist: Union[DistanceMatrix, np.ndarray],
    match_mask: np.ndarray,
    valid_mask: np.ndarray,
    ranks: Sequence[int] = (1, 20),
) -> dict[int, float]:
    """Cumulative match characteristic at the requested ranks."""
    positions = first_match_positions(dist, match_mask, valid_mask)
    evaluated = positions > 0
    n_eval = int(evaluated.sum())
    if n_eval == 0:
        raise NoEvaluableQueries("no query has a valid gallery match")
    hit_pos = positions[evaluated]
    return {int(k): float((hit_pos <= k).sum() / n_eval) for k in ranks}


def mean_average_precision(
    dist: Union[DistanceMatrix, np.ndarray],
    match_mask: np.ndarray,
    valid_mask: np.ndarray,
) -> float:
    """Mean AP over evaluable queries."""
    aps = average_precisions(dist, match_mask, valid_mask)
    evaluated = ~np.isnan(aps)
    if not evaluated.any():
        raise NoEvaluableQueries("no query has a valid gallery match")
    return float(aps[evaluated].mean())
