"""Distances, evaluation protocols, and retrieval/verification metrics."""

from .distance import METRICS, DistanceMatrix, pairwise_distances
from .evaluate import (
    CSV_COLUMNS,
    MetricReport,
    evaluate,
    reports_from_csv,
    reports_to_csv,
)
from .protocol import (
    DEFAULT_FAR_TARGETS,
    DEFAULT_RANKS,
    EvalProtocol,
    EvalUnit,
    ProtocolArrangement,
    apply_protocol,
    protocol_for,
    template_embeddings,
    template_vectors,
    unit_vectors,
)
from .ranking import (
    average_precisions,
    cmc,
    first_match_positions,
    mean_average_precision,
)
from .verification import TarOperatingPoint, tar_at_far

__all__ = [
    "CSV_COLUMNS",
    "DEFAULT_FAR_TARGETS",
    "DEFAULT_RANKS",
    "METRICS",
    "DistanceMatrix",
    "EvalProtocol",
    "EvalUnit",
    "MetricReport",
    "ProtocolArrangement",
    "TarOperatingPoint",
    "apply_protocol",
    "average_precisions",
    "cmc",
    "evaluate",
    "first_match_positions",
    "mean_average_precision",
    "pairwise_distances",
    "protocol_for",
    "reports_from_csv",
    "reports_to_csv",
    "tar_at_far",
    "template_embeddings",
    "template_vectors",
    "unit_vectors",
]
