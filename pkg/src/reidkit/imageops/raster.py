"""8-bit RGB raster buffer with binary PPM (P6) read/write."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import BadParameter, BadValue, DimMismatch, TruncatedFile


@dataclass
class ImageRaster:
    """Row-major H x W x 3 uint8 pixel buffer."""

    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels)
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise BadValue(f"pixels must be H x W x 3, got shape {self.pixels.shape}")
        if self.pixels.dtype != np.uint8:
            raise BadValue(f"pixels must be uint8, got {self.pixels.dtype}")
        if self.pixels.shape[0] < 1 or self.pixels.shape[1] < 1:
            raise BadValue("image dimensions must be positive")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def copy(self) -> "ImageRaster":
        return ImageRaster(self.pixels.copy())

    def same_bytes(self, other: "ImageRaster") -> bool:
        return self.pixels.shape == other.pixels.shape and np.array_equal(
            self.pixels, other.pixels
        )

    @classmethod
    def filled(cls, width: int, height: int, rgb=(0, 0, 0)) -> "ImageRaster":
        buf = np.empty((height, width, 3), dtype=np.uint8)
        buf[:, :] = np.asarray(rgb, dtype=np.uint8)
        return cls(buf)

    @classmethod
    def random(cls, width: int, height: int, rng: np.random.Generator, low: int = 1) -> "ImageRaster":
        """Uniform random pixels; low=1 keeps the buffer free of pure black."""
        return cls(rng.integers(low, 256, size=(height, width, 3), dtype=np.uint8))


def write_ppm(path, image: ImageRaster) -> None:
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + image.pixels.tobytes(order="C"))


def _read_token(raw: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(raw):
        if raw[pos : pos + 1].isspace():
            pos += 1
        elif raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] != b"\n":
                pos += 1
        else:
            break
    start = pos
    while pos < len(raw) and not raw[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise TruncatedFile("unexpected end of PPM header")
    return raw[start:pos], pos


def read_ppm(path) -> ImageRaster:
    raw = Path(path).read_bytes()
    token, pos = _read_token(raw, 0)
    if token != b"P6":
        raise BadParameter(f"{path}: not a binary PPM (magic {token!r})")
    width_tok, pos = _read_token(raw, pos)
    height_tok, pos = _read_token(raw, pos)
    maxval_tok, pos = _read_token(raw, pos)
    width, height, maxval = int(width_tok), int(height_tok), int(maxval_tok)
    if maxval != 255:
        raise BadParameter(f"{path}: only maxval 255 supported, got {maxval}")
    pos += 1  # single whitespace byte after maxval
    expected = width * height * 3
    payload = raw[pos : pos + expected]
    if len(payload) < expected:
        raise TruncatedFile(f"{path}: pixel payload is {len(payload)} of {expected} bytes")
    if len(raw) - pos > expected:
        raise DimMismatch(f"{path}: trailing bytes after pixel payload")
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3)
    return ImageRaster(pixels.copy())
