"""Bridge between embedding vectors and rasters for occlusion sweeps.

An embedding renders as a tile grid: each dimension owns one rectangular
tile whose intensity encodes the value on a [lo, hi] scale (bytes 1..255,
so clean renders contain no pure black). Decoding averages each tile, so
black occlusion patches drag the recovered coordinates toward lo in
proportion to how much of the tile they cover; heavier occlusion then
degrades retrieval more, which is exactly what the benchmark measures.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import BadValue, DimMismatch
from ..corpus.records import Manifest
from .occlusion import OcclusionSpec, measure_coverage, occlude_half, occlude_random_patches
from .raster import ImageRaster

DEFAULT_RASTER_WIDTH = 64
DEFAULT_RASTER_HEIGHT = 64


def _tile_grid(dim: int, width: int, height: int):
    cols = int(np.ceil(np.sqrt(dim)))
    rows = int(np.ceil(dim / cols))
    if rows > height or cols > width:
        raise BadValue(
            f"raster {width}x{height} too small for {dim} tiles ({rows}x{cols})"
        )
    ys = np.linspace(0, height, rows + 1).astype(int)
    xs = np.linspace(0, width, cols + 1).astype(int)
    tiles = []
    for d in range(dim):
        r, c = divmod(d, cols)
        tiles.append((ys[r], ys[r + 1], xs[c], xs[c + 1]))
    return tiles


def corpus_value_range(matrix: np.ndarray) -> tuple[float, float]:
    """Shared quantization range; degenerate corpora widen to a unit span."""
    lo = float(matrix.min()) if matrix.size else 0.0
    hi = float(matrix.max()) if matrix.size else 1.0
    if hi <= lo:
        hi = lo + 1.0
    return lo, hi


def vector_to_raster(
    vector: np.ndarray,
    lo: float,
    hi: float,
    width: int = DEFAULT_RASTER_WIDTH,
    height: int = DEFAULT_RASTER_HEIGHT,
) -> ImageRaster:
    vector = np.asarray(vector, dtype=np.float64)
    tiles = _tile_grid(vector.shape[0], width, height)
    buf = np.full((height, width, 3), 128, dtype=np.uint8)
    span = hi - lo
    for value, (y0, y1, x0, x1) in zip(vector, tiles):
        byte = int(np.clip(np.rint(1 + 254 * (value - lo) / span), 1, 255))
        buf[y0:y1, x0:x1] = byte
    return ImageRaster(buf)


def raster_to_vector(image: ImageRaster, dim: int, lo: float, hi: float) -> np.ndarray:
    tiles = _tile_grid(dim, image.width, image.height)
    span = hi - lo
    out = np.empty(dim)
    gray = image.pixels.astype(np.float64).mean(axis=2)
    for d, (y0, y1, x0, x1) in enumerate(tiles):
        mean_byte = gray[y0:y1, x0:x1].mean()
        out[d] = (mean_byte - 1.0) / 254.0 * span + lo
    return out


@dataclass(frozen=True)
class OccludedRecord:
    record_id: int
    level: str
    region: str
    seed: int
    measured_coverage: float


def occlude_embeddings(
    manifest: Manifest,
    matrix: np.ndarray,
    spec: OcclusionSpec,
    width: int = DEFAULT_RASTER_WIDTH,
    height: int = DEFAULT_RASTER_HEIGHT,
    workers: int = 1,
) -> tuple[np.ndarray, list[OccludedRecord]]:
    """Render, occlude, and re-encode every record of a corpus.

    Per-record seeds derive from spec.seed xor record_id, so the output
    is identical for any worker count. Returns the degraded matrix and
    one audit row per record.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape[0] != len(manifest.records):
        raise DimMismatch(
            f"{matrix.shape[0]} embedding rows vs {len(manifest.records)} records"
        )
    lo, hi = corpus_value_range(matrix)

    def process(pos: int):
        rec = manifest.records[pos]
        rec_spec = spec.for_record(rec.record_id)
        image = vector_to_raster(matrix[pos], lo, hi, width=width, height=height)
        if rec_spec.region == "whole":
            occluded = occlude_random_patches(image, rec_spec)
        else:
            occluded = occlude_half(image, rec_spec.region, rec_spec)
        vec = raster_to_vector(occluded, matrix.shape[1], lo, hi)
        audit = OccludedRecord(
            record_id=rec.record_id,
            level=rec_spec.label(),
            region=rec_spec.region,
            seed=rec_spec.seed,
            measured_coverage=measure_coverage(image, occluded),
        )
        return vec, audit

    positions = range(len(manifest.records))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(process, positions))
    else:
        results = [process(p) for p in positions]

    degraded = np.stack([vec for vec, _ in results]) if results else matrix.copy()
    return degraded.astype(np.float32), [audit for _, audit in results]


def occlusion_audit_csv(rows: list[OccludedRecord], seed: int | None = None) -> str:
    """CSV manifest of per-record occlusion outcomes."""
    lines = []
    if seed is not None:
        lines.append(f"# seed={seed}")
    lines.append("record_id,level,region,seed,measured_coverage")
    for row in rows:
        lines.append(
            f"{row.record_id},{row.level},{row.region},{row.seed},{row.measured_coverage!r}"
        )
    return "\n".join(lines) + "\n"
