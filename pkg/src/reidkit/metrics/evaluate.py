"""End-to-end corpus evaluation producing MetricReports.

evaluate() wires protocol construction, optional templating, distance
computation, CMC/mAP, and TAR@FAR together. Per-query work can be
spread over threads; chunk results are merged in query order so any
worker count reproduces the single-threaded result bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import NoEvaluableQueries, NonFiniteInput
from ..corpus.records import Manifest
from .distance import pairwise_distances
from .protocol import EvalProtocol, apply_protocol, protocol_for, unit_vectors
from .ranking import average_precisions, first_match_positions
from .verification import tar_at_far

CSV_COLUMNS = (
    "model_tag",
    "dataset",
    "protocol",
    "occlusion",
    "rank1",
    "rank20",
    "map",
    "tar@1e-3",
    "tar@1e-4",
    "evaluated",
    "skipped",
)


@dataclass(frozen=True)
class MetricReport:
    model_tag: str
    dataset: str
    protocol: str
    rank_accuracies: dict[int, float]
    map_score: float
    tar_at_far: dict[float, float]
    tar_feasible: dict[float, bool]
    num_queries_evaluated: int
    num_queries_skipped: int
    occlusion_condition: Optional[str] = None

    def rank(self, k: int) -> Optional[float]:
        return self.rank_accuracies.get(k)

    def to_json_line(self) -> str:
        payload = {
            "model_tag": self.model_tag,
            "dataset": self.dataset,
            "protocol": self.protocol,
            "occlusion": self.occlusion_condition,
            "rank_accuracies": {str(k): v for k, v in self.rank_accuracies.items()},
            "map": self.map_score,
            "tar_at_far": {repr(f): v for f, v in self.tar_at_far.items()},
            "tar_feasible": {repr(f): v for f, v in self.tar_feasible.items()},
            "evaluated": self.num_queries_evaluated,
            "skipped": self.num_queries_skipped,
        }
        return json.dumps(payload, separators=(",", ":"))

    @classmethod
    def from_json_line(cls, line: str) -> "MetricReport":
        obj = json.loads(line)
        return cls(
            model_tag=obj["model_tag"],
            dataset=obj["dataset"],
            protocol=obj["protocol"],
            rank_accuracies={int(k): float(v) for k, v in obj["rank_accuracies"].items()},
            map_score=float(obj["map"]),
            tar_at_far={float(f): float(v) for f, v in obj["tar_at_far"].items()},
            tar_feasible={float(f): bool(v) for f, v in obj["tar_feasible"].items()},
            num_queries_evaluated=int(obj["evaluated"]),
            num_queries_skipped=int(obj["skipped"]),
            occlusion_condition=obj.get("occlusion"),
        )

    def csv_row(self) -> list[str]:
        def fmt(x):
            return "" if x is None else repr(float(x))

        return [
            self.model_tag,
            self.dataset,
            self.protocol,
            self.occlusion_condition or "",
            fmt(self.rank(1)),
            fmt(self.rank(20)),
            fmt(self.map_score),
            fmt(self.tar_at_far.get(1e-3)),
            fmt(self.tar_at_far.get(1e-4)),
            str(self.num_queries_evaluated),
            str(self.num_queries_skipped),
        ]


def reports_to_csv(reports: list[MetricReport], seed: Optional[int] = None) -> str:
    """Render reports as CSV; full float precision, optional seed header."""
    buf = io.StringIO()
    if seed is not None:
        buf.write(f"# seed={seed}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for report in reports:
        writer.writerow(report.csv_row())
    return buf.getvalue()


def reports_from_csv(text: str) -> list[dict]:
    """Parse a report CSV back into plain dicts (full stored precision)."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    rows = []
    for row in reader:
        parsed = dict(row)
        for col in ("rank1", "rank20", "map", "tar@1e-3", "tar@1e-4"):
            parsed[col] = float(row[col]) if row[col] else None
        for col in ("evaluated", "skipped"):
            parsed[col] = int(row[col])
        rows.append(parsed)
    return rows


def _score_chunk(args):
    values, match, valid = args
    positions = first_match_positions(values, match, valid)
    aps = average_precisions(values, match, valid)
    genuine = values[match & valid]
    impostor = values[~match & valid]
    return positions, aps, genuine, impostor


def evaluate(
    manifest: Manifest,
    embeddings: np.ndarray,
    protocol: EvalProtocol | str,
    metric: str = "euclidean",
    normalize: bool = True,
    model_tag: str = "model",
    dataset: Optional[str] = None,
    occlusion_condition: Optional[str] = None,
    workers: int = 1,
) -> MetricReport:
    """Evaluate one corpus under one protocol.

    Embeddings are L2-normalized by default so the Euclidean ranking
    agrees with cosine similarity; genuine/impostor scores for TAR come
    from the same masked distance matrix the ranking metrics use.
    """
    if isinstance(protocol, str):
        protocol = protocol_for(protocol)
    embeddings = np.asarray(embeddings)
    if not np.isfinite(embeddings).all():
        bad = np.flatnonzero(~np.isfinite(embeddings).all(axis=1))
        raise NonFiniteInput(f"records with non-finite vectors: {bad[:8].tolist()}")

    arrangement = apply_protocol(manifest, protocol)
    if not len(arrangement.queries):
        raise NoEvaluableQueries("manifest has no query rows")
    qv = unit_vectors(arrangement.queries, embeddings, normalize)
    gv = unit_vectors(arrangement.gallery, embeddings, normalize)
    dist = pairwise_distances(
        qv,
        gv,
        metric=metric,
        query_ids=[u.identity for u in arrangement.queries],
        gallery_ids=[u.identity for u in arrangement.gallery],
    )

    nq = len(arrangement.queries)
    workers = max(1, int(workers))
    if workers == 1 or nq < 2:
        chunks = [(dist.values, arrangement.match_mask, arrangement.valid_mask)]
    else:
        bounds = np.linspace(0, nq, workers + 1).astype(int)
        chunks = [
            (
                dist.values[a:b],
                arrangement.match_mask[a:b],
                arrangement.valid_mask[a:b],
            )
            for a, b in zip(bounds[:-1], bounds[1:])
            if b > a
        ]
    if len(chunks) == 1:
        results = [_score_chunk(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_score_chunk, chunks))

    positions = np.concatenate([r[0] for r in results])
    aps = np.concatenate([r[1] for r in results])
    genuine = np.concatenate([r[2] for r in results])
    impostor = np.concatenate([r[3] for r in results])

    evaluated = positions > 0
    n_eval = int(evaluated.sum())
    if n_eval == 0:
        raise NoEvaluableQueries("every query was skipped (no valid matches)")
    rank_acc = {
        int(k): float((positions[evaluated] <= k).sum() / n_eval) for k in protocol.ranks
    }
    map_score = float(aps[evaluated].mean())
    points = tar_at_far(genuine, impostor, protocol.far_targets)

    return MetricReport(
        model_tag=model_tag,
        dataset=dataset or (sorted(manifest.dataset_tags)[0] if manifest.dataset_tags else ""),
        protocol=protocol.kind,
        rank_accuracies=rank_acc,
        map_score=map_score,
        tar_at_far={f: p.tar for f, p in points.items()},
        tar_feasible={f: p.feasible for f, p in points.items()},
        num_queries_evaluated=n_eval,
        num_queries_skipped=int((~evaluated).sum()),
        occlusion_condition=occlusion_condition,
    )
