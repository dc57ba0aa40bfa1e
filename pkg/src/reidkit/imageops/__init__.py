"""Raster operations: occlusion benchmark, augmentations, and codecs."""

from .augment import (
    AugmentConfig,
    JITTER_RANGE,
    LUMA_WEIGHTS,
    augment_records,
    color_jitter,
    gaussian_blur,
    gaussian_kernel,
    grayscale,
    horizontal_flip,
    random_augment,
)
from .codec import (
    DEFAULT_RASTER_HEIGHT,
    DEFAULT_RASTER_WIDTH,
    OccludedRecord,
    corpus_value_range,
    occlude_embeddings,
    occlusion_audit_csv,
    raster_to_vector,
    vector_to_raster,
)
from .occlusion import (
    OCCLUSION_LEVELS,
    PATCH_SIDE_RANGE,
    OcclusionSpec,
    measure_coverage,
    occlude_half,
    occlude_random_patches,
)
from .raster import ImageRaster, read_ppm, write_ppm

__all__ = [
    "AugmentConfig",
    "DEFAULT_RASTER_HEIGHT",
    "DEFAULT_RASTER_WIDTH",
    "ImageRaster",
    "JITTER_RANGE",
    "LUMA_WEIGHTS",
    "OCCLUSION_LEVELS",
    "OccludedRecord",
    "OcclusionSpec",
    "PATCH_SIDE_RANGE",
    "augment_records",
    "color_jitter",
    "corpus_value_range",
    "gaussian_blur",
    "gaussian_kernel",
    "grayscale",
    "horizontal_flip",
    "measure_coverage",
    "occlude_embeddings",
    "occlude_half",
    "occlude_random_patches",
    "occlusion_audit_csv",
    "random_augment",
    "raster_to_vector",
    "read_ppm",
    "vector_to_raster",
    "write_ppm",
]
