"""Benchmark orchestration: evaluate corpora across protocols and
occlusion conditions, persisting one CSV per report.

Output layout under the configured directory:

    reports/<model_tag>/<dataset>/<protocol>.csv
    reports/<model_tag>/<dataset>/<protocol>.<occlusion>.csv
    curves/<model_tag>.csv              (when occlusion levels are swept)
    failures.json                       (only when a dataset failed)

A failing dataset is recorded and skipped; the rest of the sweep still
runs, so long sweeps stay resumable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from ..errors import BadValue, ReidkitError
from ..corpus.io import load_corpus
from ..imageops.codec import occlude_embeddings, occlusion_audit_csv
from ..imageops.occlusion import OCCLUSION_LEVELS, OcclusionSpec
from ..metrics.evaluate import MetricReport, evaluate, reports_to_csv
from ..metrics.protocol import protocol_for
from .curves import occlusion_curve


@dataclass(frozen=True)
class CorpusEntry:
    tag: str
    embeddings_path: str
    metadata_path: str
    protocols: tuple[str, ...] = ("market",)


@dataclass(frozen=True)
class RunConfig:
    model_tag: str
    corpora: tuple[CorpusEntry, ...]
    out_dir: str
    occlusion_levels: tuple[Union[str, float], ...] = ()
    occlusion_region: str = "whole"
    metric: str = "euclidean"
    seed: int = 0
    workers: int = 1

    def validate(self) -> "RunConfig":
        tags = [c.tag for c in self.corpora]
        if len(tags) != len(set(tags)):
            raise BadValue(f"duplicate dataset tags in run config: {tags}")
        return self

    @classmethod
    def from_dict(cls, obj: dict, out_dir: Optional[str] = None) -> "RunConfig":
        corpora = tuple(
            CorpusEntry(
                tag=c["tag"],
                embeddings_path=c["embeddings"],
                metadata_path=c["metadata"],
                protocols=tuple(c.get("protocols", ["market"])),
            )
            for c in obj.get("corpora", [])
        )
        return cls(
            model_tag=obj.get("model_tag", "model"),
            corpora=corpora,
            out_dir=out_dir or obj.get("out_dir", "runs"),
            occlusion_levels=tuple(obj.get("occlusion_levels", [])),
            occlusion_region=obj.get("occlusion_region", "whole"),
            metric=obj.get("metric", "euclidean"),
            seed=int(obj.get("seed", 0)),
            workers=int(obj.get("workers", 1)),
        ).validate()


def _report_path(base: Path, report: MetricReport) -> Path:
    name = report.protocol
    if report.occlusion_condition:
        name = f"{name}.{report.occlusion_condition}"
    return base / "reports" / report.model_tag / report.dataset / f"{name}.csv"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def run_benchmark(config: RunConfig) -> list[MetricReport]:
    """Evaluate every (dataset, protocol, occlusion condition) and persist."""
    config.validate()
    base = Path(config.out_dir)
    reports: list[MetricReport] = []
    failures: dict[str, str] = {}

    for entry in config.corpora:
        try:
            manifest = load_corpus(entry.embeddings_path, entry.metadata_path)
            matrix = manifest.matrix()
            variants = [(None, matrix)]
            for level in config.occlusion_levels:
                spec = OcclusionSpec(
                    coverage=level, region=config.occlusion_region, seed=config.seed
                )
                degraded, audit = occlude_embeddings(
                    manifest, matrix, spec, workers=config.workers
                )
                _write(
                    base / "reports" / config.model_tag / entry.tag / f"occlusion.{spec.label()}.audit.csv",
                    occlusion_audit_csv(audit, seed=config.seed),
                )
                variants.append((spec.label(), degraded))

            per_protocol: dict[str, list[MetricReport]] = {}
            for kind in entry.protocols:
                for condition, emb in variants:
                    report = evaluate(
                        manifest,
                        emb,
                        protocol_for(kind),
                        metric=config.metric,
                        model_tag=config.model_tag,
                        dataset=entry.tag,
                        occlusion_condition=condition,
                        workers=config.workers,
                    )
                    reports.append(report)
                    per_protocol.setdefault(kind, []).append(report)
                    _write(_report_path(base, report), reports_to_csv([report], seed=config.seed))

            if config.occlusion_levels:
                for kind, kind_reports in per_protocol.items():
                    clean = next(r for r in kind_reports if r.occlusion_condition is None)
                    occluded = [r for r in kind_reports if r.occlusion_condition]
                    curve = occlusion_curve(clean, occluded)
                    _write(
                        base / "curves" / f"{config.model_tag}.{entry.tag}.{kind}.csv",
                        curve.to_csv(seed=config.seed),
                    )
        except ReidkitError as exc:
            failures[entry.tag] = f"{type(exc).__name__}: {exc}"
            continue

    if failures:
        _write(base / "failures.json", json.dumps(failures, indent=2, sort_keys=True) + "\n")
    return reports
