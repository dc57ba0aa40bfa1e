"""Signed ablation deltas between two report sets.

Cells live on (dataset, metric) keys and store full-precision left-minus-
right differences; rounding to two decimals (half away from zero) happens
only at display time, matching the convention of percentage-point
ablation tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Sequence, Union

from ..errors import KeyMismatch
from ..metrics.evaluate import MetricReport

METRIC_ORDER = ("r1", "map", "r20", "tar@1e-4", "tar@1e-3")

CellKey = tuple[str, str]
ReportSet = Union[Sequence[MetricReport], Mapping[CellKey, float]]


def metric_cells(reports: Sequence[MetricReport], scale: float = 100.0) -> dict[CellKey, float]:
    """Flatten reports to (dataset, metric) -> value in percentage points."""
    cells: dict[CellKey, float] = {}
    for report in reports:
        dataset = report.dataset
        if report.rank(1) is not None:
            cells[(dataset, "r1")] = scale * report.rank(1)
        if report.rank(20) is not None:
            cells[(dataset, "r20")] = scale * report.rank(20)
        cells[(dataset, "map")] = scale * report.map_score
        for far, tar in report.tar_at_far.items():
            cells[(dataset, f"tar@{far:.0e}".replace("e-0", "e-"))] = scale * tar
    return cells


def _as_cells(side: ReportSet) -> dict[CellKey, float]:
    if isinstance(side, Mapping):
        return {(str(ds), str(metric)): float(v) for (ds, metric), v in side.items()}
    return metric_cells(side)


@dataclass(frozen=True)
class DeltaTable:
    left_tag: str
    right_tag: str
    cells: dict[CellKey, float]  # full-precision left - right

    def display(self, key: CellKey) -> str:
        return format_delta(self.cells[key])

    def datasets(self) -> list[str]:
        return sorted({ds for ds, _ in self.cells})

    def metrics(self) -> list[str]:
        present = {m for _, m in self.cells}
        ordered = [m for m in METRIC_ORDER if m in present]
        return ordered + sorted(present - set(ordered))


def delta_table(left: ReportSet, right: ReportSet, left_tag: str = "left", right_tag: str = "right") -> DeltaTable:
    """Cell-wise left minus right over the shared (dataset, metric) keys."""
    lcells = _as_cells(left)
    rcells = _as_cells(right)
    shared = set(lcells) & set(rcells)
    if not shared:
        raise KeyMismatch(
            f"report sets share no (dataset, metric) keys: "
            f"left has {sorted(lcells)[:4]}, right has {sorted(rcells)[:4]}"
        )
    cells = {key: lcells[key] - rcells[key] for key in shared}
    return DeltaTable(left_tag=left_tag, right_tag=right_tag, cells=cells)


def round_half_away(value: float, places: int = 2) -> float:
    """Round half away from zero (the display convention for delta cells)."""
    quant = Decimal(10) ** -places
    return float(Decimal(repr(abs(value))).quantize(quant, rounding=ROUND_HALF_UP)) * (
        -1.0 if value < 0 else 1.0
    )


def format_delta(value: float) -> str:
    """Zero-padded signed display string, e.g. +08.15 or -00.03."""
    rounded = round_half_away(value)
    sign = "-" if rounded < 0 else "+"
    return f"{sign}{abs(rounded):05.2f}"
