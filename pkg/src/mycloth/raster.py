"""Raster: the integer image carrier used by the catalog and editing pipeline.

A Raster is an immutable uint8 image with 1 (mask), 3 (RGB), or 4 (RGBA)
channels, stored row-major. PNG is the only on-disk format.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import ValidationError

_ALLOWED_CHANNELS = (1, 3, 4)
_PIL_MODES = {1: "L", 3: "RGB", 4: "RGBA"}


@dataclass(frozen=True)
class Raster:
    width: int
    height: int
    channels: int
    data: bytes = field(repr=False)

    def __post_init__(self):
        if self.channels not in _ALLOWED_CHANNELS:
            raise ValidationError(f"unsupported channel count {self.channels}")
        if self.width <= 0 or self.height <= 0:
            raise ValidationError(f"non-positive dimensions {self.width}x{self.height}")
        expected = self.width * self.height * self.channels
        if len(self.data) != expected:
            raise ValidationError(
                f"data length {len(self.data)} != {self.width}x{self.height}x{self.channels}"
            )

    # -- conversions -------------------------------------------------------

    def to_array(self) -> np.ndarray:
        """Return an (H, W, C) uint8 view of the pixel data."""
        arr = np.frombuffer(self.data, dtype=np.uint8)
        return arr.reshape(self.height, self.width, self.channels)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Raster":
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise ValidationError(f"expected 2-D or 3-D array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            raise ValidationError(f"expected uint8 array, got {arr.dtype}")
        h, w, c = arr.shape
        return cls(width=w, height=h, channels=c, data=arr.tobytes())

    # -- validation --------------------------------------------------------

    def is_mask(self) -> bool:
        if self.channels != 1:
            return False
        arr = self.to_array()
        return bool(np.isin(arr, (0, 255)).all())

    def require_mask(self) -> "Raster":
        if not self.is_mask():
            raise ValidationError("mask raster must be single-channel with values {0, 255}")
        return self

    # -- PNG i/o -----------------------------------------------------------

    def to_png_bytes(self) -> bytes:
        img = Image.fromarray(self.to_array().squeeze(axis=2) if self.channels == 1 else self.to_array(),
                              mode=_PIL_MODES[self.channels])
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return buf.getvalue()

    def save_png(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_png_bytes())

    @classmethod
    def from_png_bytes(cls, blob: bytes) -> "Raster":
        img = Image.open(io.BytesIO(blob))
        if img.mode not in _PIL_MODES.values():
            img = img.convert("RGBA" if "A" in img.mode else "RGB")
        return cls.from_array(np.asarray(img, dtype=np.uint8))

    @classmethod
    def load_png(cls, path: str | Path) -> "Raster":
        return cls.from_png_bytes(Path(path).read_bytes())


def full_mask(width: int, height: int) -> Raster:
    return Raster.from_array(np.full((height, width), 255, dtype=np.uint8))
