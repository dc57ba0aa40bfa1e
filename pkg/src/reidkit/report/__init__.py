"""Benchmark orchestration, delta tables, curves, and table rendering."""

from .curves import DEFAULT_DECLINE_FLAG, CurvePoint, OcclusionCurve, occlusion_curve
from .delta import (
    METRIC_ORDER,
    DeltaTable,
    delta_table,
    format_delta,
    metric_cells,
    round_half_away,
)
from .run import CorpusEntry, RunConfig, run_benchmark
from .tables import NEGATIVE_MARKER, POSITIVE_MARKER, emit_tables

__all__ = [
    "DEFAULT_DECLINE_FLAG",
    "METRIC_ORDER",
    "NEGATIVE_MARKER",
    "POSITIVE_MARKER",
    "CorpusEntry",
    "CurvePoint",
    "DeltaTable",
    "OcclusionCurve",
    "RunConfig",
    "delta_table",
    "emit_tables",
    "format_delta",
    "metric_cells",
    "occlusion_curve",
    "round_half_away",
    "run_benchmark",
]
