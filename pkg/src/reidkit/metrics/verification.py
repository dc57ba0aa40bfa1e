"""Verification operating points: true accept rate at fixed false accept rate.

Scores are distances (lower = more similar). The threshold for a FAR
target is the largest distance t such that the fraction of impostor
scores strictly below t stays at or under the target, taken directly from
the impostor order statistics (no interpolation), so the empirical FAR at
the reported operating point never exceeds the target.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import BadValue, EmptyScoreList


@dataclass(frozen=True)
class TarOperatingPoint:
    far_target: float
    tar: float
    threshold: float
    empirical_far: float
    feasible: bool  # False when the target is below 1/len(impostors)


def tar_at_far(
    genuine_scores: Sequence[float],
    impostor_scores: Sequence[float],
    far_targets: Sequence[float],
) -> dict[float, TarOperatingPoint]:
    """Evaluate TAR at each FAR target from genuine/impostor distances.

    Targets below 1/len(impostors) fall back to the strictest threshold
    (the smallest impostor score) and are flagged infeasible rather than
    raising.
    """
    genuine = np.asarray(genuine_scores, dtype=np.float64).ravel()
    impostor = np.asarray(impostor_scores, dtype=np.float64).ravel()
    if genuine.size == 0 or impostor.size == 0:
        raise EmptyScoreList("both genuine and impostor score lists must be non-empty")

    imp_sorted = np.sort(impostor)
    m = imp_sorted.size
    out = {}
    for far in far_targets:
        if not 0 < far < 1:
            raise BadValue(f"far target {far} outside (0, 1)")
        allowed = int(np.floor(far * m))  # impostors permitted below threshold
        threshold = float(imp_sorted[min(allowed, m - 1)])
        tar = float((genuine < threshold).mean())
        emp = float((impostor < threshold).mean())
        out[float(far)] = TarOperatingPoint(
            far_target=float(far),
            tar=tar,
            threshold=threshold,
            empirical_far=emp,
            feasible=far * m >= 1.0,
        )
    return out
