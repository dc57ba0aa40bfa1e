"""Transfer-learning manifest composition (KS vs CCD).

The kitchen-sink protocol trains on every available re-id dataset; the
clothes-change protocol keeps only datasets whose subjects change
clothing. Membership and the clothes-change flags are fixed by the
versioned table shipped with the package (transfer_datasets.tsv).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources

from ..errors import DimMismatch, UnknownTag
from .records import EmbeddingRecord, Manifest, build_manifest

TRANSFER_PROTOCOLS = ("KS", "CCD")


@dataclass(frozen=True)
class DatasetEntry:
    tag: str
    images: int
    identities: int
    clothes_change: bool
    sections: tuple[str, ...]


def _load_table() -> dict[str, DatasetEntry]:
    text = (
        resources.files("reidkit.corpus").joinpath("transfer_datasets.tsv").read_text("utf-8")
    )
    table = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tag, images, identities, clothes, sections = line.split("\t")
        table[tag] = DatasetEntry(
            tag=tag,
            images=int(images),
            identities=int(identities),
            clothes_change=clothes == "yes",
            sections=tuple(sections.split(",")),
        )
    return table


_TABLE: dict[str, DatasetEntry] | None = None


def dataset_table() -> dict[str, DatasetEntry]:
    global _TABLE
    if _TABLE is None:
        _TABLE = _load_table()
    return _TABLE


def lookup_dataset(tag: str) -> DatasetEntry:
    table = dataset_table()
    if tag not in table:
        raise UnknownTag(f"dataset tag {tag!r} is not in the transfer dataset table")
    return table[tag]


def kept_tags(tags: list[str], protocol: str) -> list[str]:
    """Apply the transfer filtering rule to a tag list (order preserved)."""
    if protocol not in TRANSFER_PROTOCOLS:
        raise UnknownTag(f"unknown transfer protocol {protocol!r}")
    entries = [lookup_dataset(t) for t in tags]
    if protocol == "KS":
        return list(tags)
    return [e.tag for e in entries if e.clothes_change]


def compose_protocol_manifest(
    datasets: list[tuple[str, Manifest]], protocol: str
) -> Manifest:
    """Merge per-dataset manifests under a transfer protocol.

    KS keeps every input; CCD keeps only clothes-change datasets. Records
    are re-indexed and identities are namespaced with their dataset tag so
    labels never collide across sources.
    """
    keep = set(kept_tags([tag for tag, _ in datasets], protocol))
    merged: list[EmbeddingRecord] = []
    dims = set()
    row = 0
    for tag, manifest in datasets:
        if tag not in keep:
            continue
        if manifest.records:
            dims.add(manifest.dim)
        for rec in manifest.records:
            identity = rec.identity if "/" in rec.identity else f"{tag}/{rec.identity}"
            merged.append(
                replace(
                    rec,
                    record_id=row,
                    identity=identity,
                    media_id=f"{tag}/{rec.media_id}",
                    dataset=tag,
                )
            )
            row += 1
    if len(dims) > 1:
        raise DimMismatch(f"input manifests disagree on dimension: {sorted(dims)}")
    dim = dims.pop() if dims else 0
    tags = [tag for tag, _ in datasets if tag in keep]
    return build_manifest(merged, dataset_tags=tags)
