"""Training-time photometric and geometric augmentations.

All operations are pure functions of (image, parameters); the corpus
helper derives per-image seeds from the record id so parallel
application is worker-count independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BadParameter
from .raster import ImageRaster

LUMA_WEIGHTS = (0.299, 0.587, 0.114)
JITTER_RANGE = (0.6, 1.4)
SIGMA_RANGE = (0.0, 3.0)  # sigma must be in (0, 3]


def horizontal_flip(image: ImageRaster) -> ImageRaster:
    return ImageRaster(image.pixels[:, ::-1].copy())


def _luma(pixels: np.ndarray) -> np.ndarray:
    w = np.asarray(LUMA_WEIGHTS)
    return pixels.astype(np.float64) @ w


def grayscale(image: ImageRaster) -> ImageRaster:
    y = np.clip(np.rint(_luma(image.pixels)), 0, 255).astype(np.uint8)
    return ImageRaster(np.repeat(y[:, :, None], 3, axis=2))


def color_jitter(
    image: ImageRaster,
    brightness: float = 1.0,
    contrast: float = 1.0,
    saturation: float = 1.0,
) -> ImageRaster:
    """Channel-wise affine jitter: brightness scale, contrast blend toward
    the mean luma, saturation blend toward the per-pixel luma."""
    for name, factor in (("brightness", brightness), ("contrast", contrast), ("saturation", saturation)):
        if not JITTER_RANGE[0] <= factor <= JITTER_RANGE[1]:
            raise BadParameter(
                f"{name} factor {factor} outside [{JITTER_RANGE[0]}, {JITTER_RANGE[1]}]"
            )
    out = image.pixels.astype(np.float64) * brightness
    mean_luma = float(_luma(image.pixels).mean())
    out = contrast * out + (1.0 - contrast) * mean_luma
    luma = _luma(image.pixels)
    out = saturation * out + (1.0 - saturation) * luma[:, :, None]
    return ImageRaster(np.clip(np.rint(out), 0, 255).astype(np.uint8))


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian taps with radius ceil(3 sigma)."""
    radius = int(np.ceil(3.0 * sigma))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def gaussian_blur(image: ImageRaster, sigma: float) -> ImageRaster:
    """Separable Gaussian blur with edge-clamped borders."""
    if not SIGMA_RANGE[0] < sigma <= SIGMA_RANGE[1]:
        raise BadParameter(f"sigma must lie in (0, {SIGMA_RANGE[1]}], got {sigma}")
    taps = gaussian_kernel(sigma)
    radius = (len(taps) - 1) // 2
    data = image.pixels.astype(np.float64)
    padded = np.pad(data, ((radius, radius), (0, 0), (0, 0)), mode="edge")
    rows = np.zeros_like(data)
    for k, tap in enumerate(taps):
        rows += tap * padded[k : k + data.shape[0]]
    padded = np.pad(rows, ((0, 0), (radius, radius), (0, 0)), mode="edge")
    cols = np.zeros_like(data)
    for k, tap in enumerate(taps):
        cols += tap * padded[:, k : k + data.shape[1]]
    return ImageRaster(np.clip(np.rint(cols), 0, 255).astype(np.uint8))


@dataclass(frozen=True)
class AugmentConfig:
    """Sampling ranges for the stochastic augmentation pipeline.

    The transform list follows the transfer recipe: random horizontal
    flip, color jitter, random grayscale, gaussian blur. Probabilities
    and ranges are fixed defaults; the recipe names the transforms but
    not their parameters.
    """

    flip_probability: float = 0.5
    grayscale_probability: float = 0.1
    jitter_low: float = 0.6
    jitter_high: float = 1.4
    sigma_low: float = 0.1
    sigma_high: float = 2.0
    seed: int = 0


def random_augment(image: ImageRaster, rng: np.random.Generator, config: AugmentConfig = AugmentConfig()) -> ImageRaster:
    """Apply the pipeline with parameters drawn from rng (single image)."""
    out = image
    if rng.uniform() < config.flip_probability:
        out = horizontal_flip(out)
    factors = rng.uniform(config.jitter_low, config.jitter_high, size=3)
    out = color_jitter(out, *map(float, factors))
    if rng.uniform() < config.grayscale_probability:
        out = grayscale(out)
    sigma = float(rng.uniform(config.sigma_low, config.sigma_high))
    out = gaussian_blur(out, sigma)
    return out


def augment_records(
    images: list[tuple[int, ImageRaster]], config: AugmentConfig
) -> list[tuple[int, ImageRaster]]:
    """Augment (record_id, image) pairs; labels pass through untouched.

    Per-image seeds are config.seed xor record_id, so output is
    independent of iteration order or worker count.
    """
    out = []
    for record_id, image in images:
        rng = np.random.default_rng((config.seed ^ record_id) & (2**64 - 1))
        out.append((record_id, random_augment(image, rng, config)))
    return out
