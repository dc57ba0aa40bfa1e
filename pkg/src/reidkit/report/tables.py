"""Render reports and delta tables to CSV or markdown documents."""

from __future__ import annotations

import io
from typing import Optional, Sequence, Union

from ..errors import BadValue
from ..metrics.evaluate import MetricReport, reports_to_csv
from .delta import DeltaTable, format_delta

POSITIVE_MARKER = "🟢"
NEGATIVE_MARKER = "🔴"

FORMATS = ("csv", "markdown")


def _report_markdown(reports: Sequence[MetricReport]) -> str:
    header = [
        "model",
        "dataset",
        "protocol",
        "occlusion",
        "R1",
        "mAP",
        "R20",
        "T@F 1e-4",
        "T@F 1e-3",
    ]
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for r in reports:
        def pct(x: Optional[float]) -> str:
            return "" if x is None else f"{100.0 * x:.2f}"

        lines.append(
            "| "
            + " | ".join(
                [
                    r.model_tag,
                    r.dataset,
                    r.protocol,
                    r.occlusion_condition or "clean",
                    pct(r.rank(1)),
                    pct(r.map_score),
                    pct(r.rank(20)),
                    pct(r.tar_at_far.get(1e-4)),
                    pct(r.tar_at_far.get(1e-3)),
                ]
            )
            + " |"
        )
    return "\n".join(lines) + "\n"


def _delta_markdown(delta: DeltaTable) -> str:
    metrics = delta.metrics()
    lines = [
        f"## {delta.left_tag} - {delta.right_tag}",
        "",
        "| dataset | " + " | ".join(metrics) + " |",
        "|" + "---|" * (len(metrics) + 1),
    ]
    for dataset in delta.datasets():
        cells = []
        for metric in metrics:
            key = (dataset, metric)
            if key not in delta.cells:
                cells.append("")
                continue
            text = format_delta(delta.cells[key])
            marker = POSITIVE_MARKER if delta.cells[key] >= 0 else NEGATIVE_MARKER
            cells.append(f"{text} {marker}")
        lines.append("| " + dataset + " | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def _delta_csv(delta: DeltaTable, seed: Optional[int] = None) -> str:
    buf = io.StringIO()
    if seed is not None:
        buf.write(f"# seed={seed}\n")
    buf.write("dataset,metric,delta,display\n")
    for (dataset, metric) in sorted(delta.cells):
        value = delta.cells[(dataset, metric)]
        buf.write(f"{dataset},{metric},{value!r},{format_delta(value)}\n")
    return buf.getvalue()


def emit_tables(
    payload: Union[Sequence[MetricReport], DeltaTable],
    fmt: str = "csv",
    seed: Optional[int] = None,
) -> str:
    """Serialize reports or a delta table; stored values keep full precision
    in CSV, display rounding appears only in markdown/display columns."""
    if fmt not in FORMATS:
        raise BadValue(f"format must be one of {FORMATS}, got {fmt!r}")
    if isinstance(payload, DeltaTable):
        return _delta_csv(payload, seed) if fmt == "csv" else _delta_markdown(payload)
    reports = list(payload)
    return reports_to_csv(reports, seed=seed) if fmt == "csv" else _report_markdown(reports)
