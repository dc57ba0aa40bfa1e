"""Random black-patch occlusion with coverage targets and auditing.

Axis-aligned black rectangles with side lengths drawn uniformly from
10-35% of the region's dimensions are stacked until the occluded-pixel
fraction lands inside the target band (coverage +/- tolerance). A patch
that would overshoot the band is trimmed row by row (then column by
column), which bounds the loop and makes every spec reachable unless a
single pixel step already exceeds the band.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from ..errors import BadParameter, DimMismatch, UnreachableCoverage
from .raster import ImageRaster

OCCLUSION_LEVELS = {
    "light": 0.20,
    "moderate": 0.40,
    "heavy": 0.60,
    "extreme": 0.80,
}
REGIONS = ("whole", "top_half", "bottom_half")
PATCH_SIDE_RANGE = (0.10, 0.35)
_MAX_PATCHES = 4096


@dataclass(frozen=True)
class OcclusionSpec:
    coverage: Union[str, float]  # level name or explicit fraction
    region: str = "whole"
    tolerance: float = 0.02
    seed: int = 0

    def __post_init__(self):
        target = self.target_coverage()
        if self.region not in REGIONS:
            raise BadParameter(f"region must be one of {REGIONS}")
        if self.tolerance < 0:
            raise BadParameter("tolerance must be non-negative")
        # exact 0/1 bypass the band; anything else must leave a usable band
        if 0.0 < target < 1.0:
            if target + self.tolerance >= 1.0 or target - self.tolerance <= 0.0:
                raise BadParameter(
                    f"coverage {target} with tolerance {self.tolerance} leaves no band in (0, 1)"
                )
        elif target not in (0.0, 1.0):
            raise BadParameter(f"coverage must lie in [0, 1], got {target}")
        if self.seed < 0 or self.seed >= 2**64:
            raise BadParameter("seed must fit in 64 unsigned bits")

    def target_coverage(self) -> float:
        if isinstance(self.coverage, str):
            if self.coverage not in OCCLUSION_LEVELS:
                raise BadParameter(
                    f"unknown occlusion level {self.coverage!r}; "
                    f"expected one of {sorted(OCCLUSION_LEVELS)}"
                )
            return OCCLUSION_LEVELS[self.coverage]
        return float(self.coverage)

    def label(self) -> str:
        if isinstance(self.coverage, str):
            return self.coverage
        return f"cov{float(self.coverage):.2f}"

    def for_record(self, record_id: int) -> "OcclusionSpec":
        """Derive a per-record spec: seed xor record_id keeps corpus-level
        application independent of worker count."""
        return replace(self, seed=(self.seed ^ record_id) & (2**64 - 1))


def _row_bounds(height: int, region: str) -> tuple[int, int]:
    mid = (height + 1) // 2  # top half owns the extra row of odd heights
    if region == "whole":
        return 0, height
    if region == "top_half":
        return 0, mid
    return mid, height


def _fill_mask(mask: np.ndarray, target: float, tolerance: float, rng: np.random.Generator):
    """Stack patches into the boolean mask until coverage is in band."""
    region_h, region_w = mask.shape
    area = region_h * region_w
    lo_side = PATCH_SIDE_RANGE[0]
    hi_side = PATCH_SIDE_RANGE[1]
    occupied = int(mask.sum())
    for _ in range(_MAX_PATCHES):
        if occupied >= (target - tolerance) * area:
            return
        h = max(1, min(region_h, int(round(rng.uniform(lo_side, hi_side) * region_h))))
        w = max(1, min(region_w, int(round(rng.uniform(lo_side, hi_side) * region_w))))
        y = int(rng.integers(0, region_h - h + 1))
        x = int(rng.integers(0, region_w - w + 1))
        # trim the patch if it would overshoot the band
        while h > 0 and w > 0:
            patch = mask[y : y + h, x : x + w]
            gain = patch.size - int(patch.sum())
            if occupied + gain <= (target + tolerance) * area:
                break
            if h > 1:
                h -= 1
            elif w > 1:
                w -= 1
            else:
                raise UnreachableCoverage(
                    f"tolerance {tolerance} is tighter than one pixel "
                    f"({1.0 / area:.2e} of the region)"
                )
        patch = mask[y : y + h, x : x + w]
        occupied += patch.size - int(patch.sum())
        patch[:] = True
    if occupied < (target - tolerance) * area:
        raise UnreachableCoverage(
            f"failed to reach coverage {target} +/- {tolerance} within {_MAX_PATCHES} patches"
        )


def _occlude_region(image: ImageRaster, spec: OcclusionSpec, region: str) -> ImageRaster:
    target = spec.target_coverage()
    out = image.copy()
    top, bottom = _row_bounds(image.height, region)
    if target <= 0.0:
        return out
    if target >= 1.0:
        out.pixels[top:bottom] = 0
        return out
    rng = np.random.default_rng(spec.seed)
    mask = np.zeros((bottom - top, image.width), dtype=bool)
    _fill_mask(mask, target, spec.tolerance, rng)
    region_pixels = out.pixels[top:bottom]
    region_pixels[mask] = 0
    return out


def occlude_random_patches(image: ImageRaster, spec: OcclusionSpec) -> ImageRaster:
    """Occlude the whole image with random black patches."""
    if spec.region != "whole":
        raise BadParameter("occlude_random_patches expects region='whole'; use occlude_half")
    return _occlude_region(image, spec, "whole")


def occlude_half(image: ImageRaster, which: str, spec: OcclusionSpec) -> ImageRaster:
    """Occlude one half of the image; the other half is untouched byte-for-byte.

    The coverage target applies within the selected half.
    """
    if which not in ("top_half", "bottom_half"):
        raise BadParameter(f"which must be top_half or bottom_half, got {which!r}")
    if image.height < 2:
        raise BadParameter("half occlusion needs image height >= 2")
    return _occlude_region(image, spec, which)


def measure_coverage(original: ImageRaster, occluded: ImageRaster) -> float:
    """Fraction of pixels that changed and are black in the occluded image."""
    if original.pixels.shape != occluded.pixels.shape:
        raise DimMismatch(
            f"shape mismatch: {original.pixels.shape} vs {occluded.pixels.shape}"
        )
    changed = (original.pixels != occluded.pixels).any(axis=2)
    black = (occluded.pixels == 0).all(axis=2)
    return float((changed & black).mean())
