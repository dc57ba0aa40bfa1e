"""Occlusion robustness curves: absolute and relative rank-1 per level."""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Optional, Sequence

from ..errors import KeyMismatch
from ..imageops.occlusion import OCCLUSION_LEVELS
from ..metrics.evaluate import MetricReport

# the observed real-model bound for bottom-half occlusion: declines past
# this fraction of clean rank-1 get flagged in the emitted curve
DEFAULT_DECLINE_FLAG = 0.10


@dataclass(frozen=True)
class CurvePoint:
    level: str
    coverage: float
    rank1: float
    relative: Optional[float]  # None when clean rank-1 is zero
    flagged: bool


@dataclass(frozen=True)
class OcclusionCurve:
    model_tag: str
    clean_rank1: float
    points: tuple[CurvePoint, ...]

    @property
    def clean_rank1_zero(self) -> bool:
        return self.clean_rank1 == 0.0

    def to_csv(self, seed: Optional[int] = None) -> str:
        buf = io.StringIO()
        if seed is not None:
            buf.write(f"# seed={seed}\n")
        buf.write("level,coverage,rank1,relative_rank1,decline_flagged\n")
        for p in self.points:
            rel = "" if p.relative is None else repr(p.relative)
            buf.write(f"{p.level},{p.coverage!r},{p.rank1!r},{rel},{int(p.flagged)}\n")
        return buf.getvalue()


def _coverage_of(label: str) -> float:
    if label in OCCLUSION_LEVELS:
        return OCCLUSION_LEVELS[label]
    if label.startswith("cov"):
        return float(label[3:])
    raise KeyMismatch(f"cannot order occlusion condition {label!r}")


def occlusion_curve(
    clean: MetricReport,
    occluded: Sequence[MetricReport],
    decline_flag: float = DEFAULT_DECLINE_FLAG,
) -> OcclusionCurve:
    """Build a plot-ready curve ordered by coverage level.

    relative = occluded rank-1 / clean rank-1; when clean rank-1 is zero
    the relative column is left empty but absolute values are still
    emitted. A point is flagged when its relative decline exceeds
    decline_flag.
    """
    if clean.rank(1) is None:
        raise KeyMismatch("clean report carries no rank-1 value")
    clean_r1 = clean.rank(1)
    points = []
    for report in sorted(occluded, key=lambda r: _coverage_of(r.occlusion_condition or "")):
        label = report.occlusion_condition or ""
        r1 = report.rank(1)
        if r1 is None:
            raise KeyMismatch(f"occluded report {label!r} carries no rank-1 value")
        if clean_r1 > 0:
            rel = r1 / clean_r1
            flagged = (1.0 - rel) > decline_flag
        else:
            rel = None
            flagged = False
        points.append(
            CurvePoint(
                level=label,
                coverage=_coverage_of(label),
                rank1=r1,
                relative=rel,
                flagged=flagged,
            )
        )
    return OcclusionCurve(model_tag=clean.model_tag, clean_rank1=clean_r1, points=tuple(points))
