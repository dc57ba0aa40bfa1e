"""Single command-line entry point for the toolkit.

Subcommands: synth, validate, eval, train, occlude, report, delta.
Flag values override --config values, which override built-in defaults.
Exit codes: 0 success, 1 validation/data failure, 2 usage error. Every
randomized subcommand requires a seed (flag or config) and echoes it into
the header of each textual artifact it writes; all file side effects stay
inside the configured output directory.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional, Sequence, Union

from .errors import BadValue, ReidkitError
from .corpus import (
    SynthConfig,
    load_corpus,
    synth_corpus,
    validate_corpus,
    write_embeddings,
    write_metadata,
)
from .imageops import OcclusionSpec, occlude_embeddings, occlusion_audit_csv
from .imageops.occlusion import OCCLUSION_LEVELS
from .metrics import (
    MetricReport,
    evaluate,
    protocol_for,
    reports_from_csv,
    reports_to_csv,
)
from .mining import ToyEncoder, TrainConfig, train
from .report import RunConfig, delta_table, emit_tables, run_benchmark
from .corpus.records import PROTOCOL_KINDS

SUBCOMMANDS = ("synth", "validate", "eval", "train", "occlude", "report", "delta")


def _parse_levels(text: str) -> tuple[Union[str, float], ...]:
    levels: list[Union[str, float]] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if token in OCCLUSION_LEVELS:
            levels.append(token)
        else:
            try:
                levels.append(float(token))
            except ValueError as exc:
                raise BadValue(f"occlusion level {token!r} is neither a name nor a number") from exc
    if not levels:
        raise BadValue("at least one occlusion level is required")
    return tuple(levels)


def _render_levels(levels: Sequence[Union[str, float]]) -> str:
    return ",".join(v if isinstance(v, str) else repr(v) for v in levels)


@dataclass(frozen=True)
class Opt:
    name: str
    type: Callable[[str], Any]
    default: Any
    help: str
    required: bool = False
    is_flag: bool = False
    choices: Optional[tuple[str, ...]] = None
    render: Optional[Callable[[Any], str]] = None

    @property
    def dest(self) -> str:
        return self.name.replace("-", "_")


def _render_value(opt: Opt, value: Any) -> str:
    if opt.render is not None:
        return opt.render(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


_COMMON = [
    Opt("config", str, None, "path to a JSON config file with per-subcommand sections"),
]

OPTIONS: dict[str, list[Opt]] = {
    "synth": [
        Opt("out", str, None, "output directory", required=True),
        Opt("seed", int, None, "generator seed", required=True),
        Opt("identities", int, 20, "number of identities"),
        Opt("clothes-sets", int, 2, "clothes sets per identity"),
        Opt("images-per-set", int, 4, "images per clothes set"),
        Opt("dim", int, 32, "embedding dimension"),
        Opt("separation", float, 1.0, "identity cluster center spacing"),
        Opt("clothes-offset", float, 0.0, "clothes offset magnitude"),
        Opt("noise", float, 0.0, "per-image noise magnitude"),
        Opt("holdout-fraction", float, 0.5, "fraction of identities held out for eval splits"),
        Opt("cameras", int, 4, "number of synthetic camera labels"),
        Opt("tag", str, "synth", "dataset tag"),
    ],
    "validate": [
        Opt("embeddings", str, None, "embedding container path", required=True),
        Opt("metadata", str, None, "metadata JSONL path", required=True),
        Opt("out", str, None, "optional directory for the validation report"),
    ],
    "eval": [
        Opt("embeddings", str, None, "embedding container path", required=True),
        Opt("metadata", str, None, "metadata JSONL path", required=True),
        Opt("out", str, None, "output directory", required=True),
        Opt("protocol", str, "market", "evaluation protocol", choices=PROTOCOL_KINDS),
        Opt("metric", str, "euclidean", "distance metric", choices=("euclidean", "cosine_distance")),
        Opt("model-tag", str, "model", "model tag for the report"),
        Opt("dataset", str, None, "dataset tag override"),
        Opt("seed", int, 0, "seed echoed into artifacts (evaluation itself is deterministic)"),
        Opt("workers", int, 1, "worker threads; results are identical for any count"),
        Opt("raw-distances", bool, False, "skip L2 normalization before distances", is_flag=True),
    ],
    "train": [
        Opt("embeddings", str, None, "embedding container path", required=True),
        Opt("metadata", str, None, "metadata JSONL path", required=True),
        Opt("out", str, None, "output directory", required=True),
        Opt("seed", int, None, "training seed", required=True),
        Opt("steps", int, 1000, "number of optimizer steps"),
        Opt("margin", float, 0.35, "triplet margin"),
        Opt("batch-identities", int, 10, "identities per batch (P)"),
        Opt("images-per-identity", int, 4, "images per identity (K)"),
        Opt("lr", float, 1e-5, "Adam learning rate"),
        Opt("weight-decay", float, 1e-6, "additive weight decay"),
        Opt("eval-protocol", str, "prcc_cc", "validation protocol", choices=PROTOCOL_KINDS),
        Opt("nonlinearity", str, "identity", "encoder nonlinearity", choices=("identity", "tanh")),
    ],
    "occlude": [
        Opt("embeddings", str, None, "embedding container path", required=True),
        Opt("metadata", str, None, "metadata JSONL path", required=True),
        Opt("out", str, None, "output directory", required=True),
        Opt("seed", int, None, "occlusion seed", required=True),
        Opt(
            "levels",
            _parse_levels,
            ("light", "moderate", "heavy", "extreme"),
            "comma-separated coverage levels (names or fractions); defaults to 20/40/60/80%",
            render=_render_levels,
        ),
        Opt("region", str, "whole", "occlusion region", choices=("whole", "top_half", "bottom_half")),
        Opt("tolerance", float, 0.02, "coverage tolerance"),
        Opt("workers", int, 1, "worker threads; results are identical for any count"),
    ],
    "report": [
        Opt("run-config", str, None, "JSON run configuration (corpora, protocols, levels)", required=True),
        Opt("out", str, None, "output directory", required=True),
        Opt("seed", int, None, "sweep seed", required=True),
        Opt("workers", int, 1, "worker threads; results are identical for any count"),
    ],
    "delta": [
        Opt("left", str, None, "report CSV for the left side", required=True),
        Opt("right", str, None, "report CSV for the right side", required=True),
        Opt("out", str, None, "output directory", required=True),
        Opt("left-tag", str, "left", "label for the left side"),
        Opt("right-tag", str, "right", "label for the right side"),
        Opt("seed", int, 0, "seed echoed into artifacts"),
    ],
}


@dataclass(frozen=True)
class CliInvocation:
    subcommand: str
    flags: dict[str, Any]
    config_path: Optional[str] = None

    def to_argv(self) -> list[str]:
        """Render back to an argv that re-parses to an equal invocation."""
        argv = [self.subcommand]
        for opt in OPTIONS[self.subcommand]:
            value = self.flags.get(opt.dest)
            if value is None:
                continue
            if opt.is_flag:
                if value:
                    argv.append(f"--{opt.name}")
                continue
            argv.extend([f"--{opt.name}", _render_value(opt, value)])
        return argv


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reidkit",
        description="Long-term re-id evaluation, training, and occlusion benchmarking",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name, opts in OPTIONS.items():
        sub = subparsers.add_parser(name, help=f"{name} subcommand")
        for opt in _COMMON + opts:
            if opt.is_flag:
                sub.add_argument(f"--{opt.name}", dest=opt.dest, action="store_true", default=None, help=opt.help)
            else:
                kwargs: dict[str, Any] = {
                    "dest": opt.dest,
                    "default": None,
                    "help": f"{opt.help} (default: {_render_value(opt, opt.default) if opt.default is not None else 'required' if opt.required else 'none'})",
                }
                if opt.choices:
                    kwargs["choices"] = list(opt.choices)
                    kwargs["type"] = str
                else:
                    kwargs["type"] = opt.type
                sub.add_argument(f"--{opt.name}", **kwargs)
    return parser


def parse_args(argv: Sequence[str]) -> CliInvocation:
    """Parse argv into a merged, validated invocation.

    Precedence: explicit flags, then the config file's subcommand
    section, then built-in defaults.
    """
    parser = _build_parser()
    namespace = parser.parse_args(list(argv))
    sub = namespace.subcommand
    config_path = getattr(namespace, "config", None)
    section: dict[str, Any] = {}
    if config_path:
        try:
            full = json.loads(Path(config_path).read_text("utf-8"))
        except FileNotFoundError as exc:
            raise BadValue(f"config file not found: {config_path}") from exc
        except json.JSONDecodeError as exc:
            raise BadValue(f"config file is not valid JSON: {exc}") from exc
        section = full.get(sub, {})
        unknown = set(section) - {o.dest for o in OPTIONS[sub]}
        if unknown:
            raise BadValue(f"config section {sub!r} has unknown keys: {sorted(unknown)}")

    flags: dict[str, Any] = {}
    for opt in OPTIONS[sub]:
        explicit = getattr(namespace, opt.dest)
        if explicit is not None:
            value = explicit
        elif opt.dest in section:
            raw = section[opt.dest]
            value = opt.type(raw) if isinstance(raw, str) and not opt.is_flag else raw
        else:
            value = opt.default
        if isinstance(value, list):
            value = tuple(value)
        if value is None and opt.required:
            raise BadValue(f"--{opt.name} is required for {sub!r} (flag or config)")
        flags[opt.dest] = value

    invocation = CliInvocation(subcommand=sub, flags=flags, config_path=config_path)
    _validate_invocation(invocation)
    return invocation


def _validate_invocation(inv: CliInvocation) -> None:
    f = inv.flags
    if inv.subcommand == "synth":
        SynthConfig(
            num_identities=f["identities"],
            clothes_sets_per_identity=f["clothes_sets"],
            images_per_clothes_set=f["images_per_set"],
            dim=f["dim"],
            identity_separation=f["separation"],
            clothes_offset_scale=f["clothes_offset"],
            noise_scale=f["noise"],
            seed=f["seed"],
            holdout_fraction=f["holdout_fraction"],
            num_cameras=f["cameras"],
            dataset_tag=f["tag"],
        ).validate()
    elif inv.subcommand == "train":
        TrainConfig(
            margin=f["margin"],
            batch_identities=f["batch_identities"],
            images_per_identity=f["images_per_identity"],
            learning_rate=f["lr"],
            weight_decay=f["weight_decay"],
            max_steps=f["steps"],
            seed=f["seed"],
            eval_protocol=f["eval_protocol"],
        ).validate()
    elif inv.subcommand == "occlude":
        for level in f["levels"]:
            OcclusionSpec(coverage=level, region=f["region"], tolerance=f["tolerance"], seed=f["seed"])
    elif inv.subcommand in ("eval", "report"):
        if f["workers"] < 1:
            raise BadValue("--workers must be >= 1")


def _cmd_synth(f: dict[str, Any]) -> int:
    config = SynthConfig(
        num_identities=f["identities"],
        clothes_sets_per_identity=f["clothes_sets"],
        images_per_clothes_set=f["images_per_set"],
        dim=f["dim"],
        identity_separation=f["separation"],
        clothes_offset_scale=f["clothes_offset"],
        noise_scale=f["noise"],
        seed=f["seed"],
        holdout_fraction=f["holdout_fraction"],
        num_cameras=f["cameras"],
        dataset_tag=f["tag"],
    )
    manifest, matrix = synth_corpus(config)
    out = Path(f["out"])
    out.mkdir(parents=True, exist_ok=True)
    write_embeddings(out / "embeddings.emb", matrix)
    write_metadata(out / "metadata.jsonl", manifest.records)
    summary = {
        "seed": config.seed,
        "records": len(manifest.records),
        "dim": manifest.dim,
        "identities": config.num_identities,
        "splits": {s: len(manifest.split(s)) for s in ("train", "query", "gallery")},
    }
    (out / "synth.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", "utf-8")
    print(f"wrote {len(manifest.records)} records to {out}")
    return 0


def _cmd_validate(f: dict[str, Any]) -> int:
    manifest = load_corpus(f["embeddings"], f["metadata"])
    report = validate_corpus(manifest, manifest.matrix())
    print(report.summary())
    if f.get("out"):
        out = Path(f["out"])
        out.mkdir(parents=True, exist_ok=True)
        (out / "validation.json").write_text(
            json.dumps(
                {
                    "clean": report.is_clean,
                    "non_finite_records": list(report.non_finite_records),
                    "dim_conflicts": list(report.dim_conflicts),
                    "blank_identities": list(report.blank_identities),
                    "unmatched_query_identities": list(report.unmatched_query_identities),
                    "num_records": report.num_records,
                },
                indent=2,
                sort_keys=True,
            )
            + "\n",
            "utf-8",
        )
    return 0 if report.is_clean else 1


def _cmd_eval(f: dict[str, Any]) -> int:
    manifest = load_corpus(f["embeddings"], f["metadata"])
    report = evaluate(
        manifest,
        manifest.matrix(),
        protocol_for(f["protocol"]),
        metric=f["metric"],
        normalize=not f.get("raw_distances"),
        model_tag=f["model_tag"],
        dataset=f.get("dataset"),
        workers=f["workers"],
    )
    out = Path(f["out"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.csv").write_text(reports_to_csv([report], seed=f["seed"]), "utf-8")
    (out / "report.jsonl").write_text(
        f"# seed={f['seed']}\n" + report.to_json_line() + "\n", "utf-8"
    )
    print(
        f"{report.dataset}/{report.protocol}: rank1={report.rank(1):.4f} "
        f"map={report.map_score:.4f} evaluated={report.num_queries_evaluated} "
        f"skipped={report.num_queries_skipped}"
    )
    return 0


def _cmd_train(f: dict[str, Any]) -> int:
    manifest = load_corpus(f["embeddings"], f["metadata"])
    config = TrainConfig(
        margin=f["margin"],
        batch_identities=f["batch_identities"],
        images_per_identity=f["images_per_identity"],
        learning_rate=f["lr"],
        weight_decay=f["weight_decay"],
        max_steps=f["steps"],
        seed=f["seed"],
        eval_protocol=f["eval_protocol"],
    )
    encoder = ToyEncoder.identity_init(manifest.dim, nonlinearity=f["nonlinearity"])
    result = train(manifest, encoder, config)
    out = Path(f["out"])
    out.mkdir(parents=True, exist_ok=True)
    result.encoder.save(out / "encoder.enc")
    (out / "trace.csv").write_text(result.trace_csv(seed=config.seed), "utf-8")
    final_val = result.eval_trace[-1][2] if result.eval_trace else None
    summary = {
        "seed": config.seed,
        "steps": config.max_steps,
        "final_loss": result.loss_trace[-1].loss,
        "final_val_rank1": final_val,
    }
    (out / "train.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", "utf-8")
    print(f"trained {config.max_steps} steps; final val rank1: {final_val}")
    return 0


def _cmd_occlude(f: dict[str, Any]) -> int:
    manifest = load_corpus(f["embeddings"], f["metadata"])
    matrix = manifest.matrix()
    out = Path(f["out"])
    out.mkdir(parents=True, exist_ok=True)
    for level in f["levels"]:
        spec = OcclusionSpec(
            coverage=level, region=f["region"], tolerance=f["tolerance"], seed=f["seed"]
        )
        degraded, audit = occlude_embeddings(manifest, matrix, spec, workers=f["workers"])
        write_embeddings(out / f"occluded.{spec.label()}.emb", degraded)
        (out / f"occlusion.{spec.label()}.csv").write_text(
            occlusion_audit_csv(audit, seed=f["seed"]), "utf-8"
        )
        print(f"level {spec.label()}: wrote {degraded.shape[0]} occluded embeddings")
    return 0


def _cmd_report(f: dict[str, Any]) -> int:
    obj = json.loads(Path(f["run_config"]).read_text("utf-8"))
    obj["seed"] = f["seed"]
    obj["workers"] = f["workers"]
    config = RunConfig.from_dict(obj, out_dir=f["out"])
    reports = run_benchmark(config)
    combined = reports_to_csv(reports, seed=config.seed)
    out = Path(f["out"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "all_reports.csv").write_text(combined, "utf-8")
    print(f"wrote {len(reports)} reports under {out}")
    return 0


def _load_reports_csv(path: str) -> list[MetricReport]:
    rows = reports_from_csv(Path(path).read_text("utf-8"))
    reports = []
    for row in rows:
        ranks = {}
        if row["rank1"] is not None:
            ranks[1] = row["rank1"]
        if row["rank20"] is not None:
            ranks[20] = row["rank20"]
        tar = {}
        if row["tar@1e-3"] is not None:
            tar[1e-3] = row["tar@1e-3"]
        if row["tar@1e-4"] is not None:
            tar[1e-4] = row["tar@1e-4"]
        reports.append(
            MetricReport(
                model_tag=row["model_tag"],
                dataset=row["dataset"],
                protocol=row["protocol"],
                rank_accuracies=ranks,
                map_score=row["map"],
                tar_at_far=tar,
                tar_feasible={k: True for k in tar},
                num_queries_evaluated=row["evaluated"],
                num_queries_skipped=row["skipped"],
                occlusion_condition=row["occlusion"] or None,
            )
        )
    return reports


def _cmd_delta(f: dict[str, Any]) -> int:
    left = _load_reports_csv(f["left"])
    right = _load_reports_csv(f["right"])
    table = delta_table(left, right, left_tag=f["left_tag"], right_tag=f["right_tag"])
    out = Path(f["out"]) / "deltas"
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{f['left_tag']}-{f['right_tag']}"
    (out / f"{stem}.md").write_text(emit_tables(table, "markdown"), "utf-8")
    (out / f"{stem}.csv").write_text(emit_tables(table, "csv", seed=f["seed"]), "utf-8")
    print(f"wrote delta table {stem} ({len(table.cells)} cells)")
    return 0


_HANDLERS = {
    "synth": _cmd_synth,
    "validate": _cmd_validate,
    "eval": _cmd_eval,
    "train": _cmd_train,
    "occlude": _cmd_occlude,
    "report": _cmd_report,
    "delta": _cmd_delta,
}


def dispatch(invocation: CliInvocation) -> int:
    """Execute a parsed invocation; domain errors map to exit code 1."""
    handler = _HANDLERS[invocation.subcommand]
    return handler(invocation.flags)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        invocation = parse_args(sys.argv[1:] if argv is None else list(argv))
    except ReidkitError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return dispatch(invocation)
    except ReidkitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
