"""Embedding corpus data model, file ingestion, synthesis, and composition."""

from .io import (
    EMBEDDING_MAGIC,
    ENCODER_MAGIC,
    load_corpus,
    read_embeddings,
    read_metadata,
    write_embeddings,
    write_metadata,
)
from .protocols import (
    DatasetEntry,
    compose_protocol_manifest,
    dataset_table,
    kept_tags,
    lookup_dataset,
)
from .records import (
    EmbeddingRecord,
    Manifest,
    ValidationReport,
    build_manifest,
    validate_corpus,
)
from .synth import SynthConfig, synth_corpus

__all__ = [
    "EMBEDDING_MAGIC",
    "ENCODER_MAGIC",
    "DatasetEntry",
    "EmbeddingRecord",
    "Manifest",
    "SynthConfig",
    "ValidationReport",
    "build_manifest",
    "compose_protocol_manifest",
    "dataset_table",
    "kept_tags",
    "load_corpus",
    "lookup_dataset",
    "read_embeddings",
    "read_metadata",
    "synth_corpus",
    "validate_corpus",
    "write_embeddings",
    "write_metadata",
]
