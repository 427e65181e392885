"""Dominant-color extraction and edge-preserving recoloring."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.types import ColorRGB
from ..errors import ValidationError
from ..raster import Raster
from .edges import EdgeMask, denoise_masked

BUCKET_WIDTH = 8  # 32 buckets per channel


@dataclass(frozen=True)
class RecolorParams:
    main_color: ColorRGB
    target_color: ColorRGB


def compute_main_color(image: Raster, cloth_mask: Raster) -> ColorRGB:
    """Mode of the masked colors after 8-wide channel quantization, reported
    as the mean color of the winning bucket. Ties go to the lowest (r, g, b)
    bucket."""
    cloth_mask.require_mask()
    inside = cloth_mask.to_array()[:, :, 0] == 255
    if not inside.any():
        raise ValidationError("cloth mask selects no pixels")
    pixels = denoise_masked(image, cloth_mask)[inside]  # (N, 3) float
    buckets = (pixels // BUCKET_WIDTH).astype(np.int64)
    keys = buckets[:, 0] * 32 * 32 + buckets[:, 1] * 32 + buckets[:, 2]
    counts = np.bincount(keys, minlength=32 ** 3)
    best = int(np.argmax(counts))  # argmax returns the lowest index on ties
    mean = pixels[keys == best].mean(axis=0)
    r, g, b = (int(round(v)) for v in mean)
    return ColorRGB(r, g, b)


def recolor(image: Raster, cloth_mask: Raster, edges: EdgeMask, params: RecolorParams) -> Raster:
    """Shift every non-edge cloth pixel by (target - main), clamped to [0, 255].

    Edge pixels and pixels outside the mask are copied through unchanged.
    """
    dims = (image.width, image.height)
    if dims != (cloth_mask.width, cloth_mask.height) or dims != (edges.mask.width, edges.mask.height):
        raise ValidationError("image, mask, and edge dimensions differ")
    cloth_mask.require_mask()
    inside = cloth_mask.to_array()[:, :, 0] == 255
    edge = edges.to_bool()

    offset = np.array(params.target_color.as_tuple(), dtype=np.int32) - np.array(
        params.main_color.as_tuple(), dtype=np.int32
    )
    arr = image.to_array().astype(np.int32)
    shifted = np.clip(arr + offset[None, None, :], 0, 255)
    moved = inside & ~edge
    out = np.where(moved[:, :, None], shifted, arr).astype(np.uint8)
    return Raster.from_array(out)
