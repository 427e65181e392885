"""Placement clamping: keep the scaled paint inside the printable region."""
from __future__ import annotations

from ..core.types import PaintPlacement, Rect


def scaled_size(paint_size: tuple[int, int], scale: float) -> tuple[int, int]:
    """Pixel size of a paint after scaling; shared with the compositor."""
    w, h = paint_size
    return max(1, int(round(w * scale))), max(1, int(round(h * scale)))


def clamp_placement(placement: PaintPlacement, paint_size: tuple[int, int], region: Rect) -> PaintPlacement:
    """Nearest valid placement: anchor moved minimally, scale shrunk only if
    the paint cannot fit at any anchor."""
    w, h = paint_size
    scale = placement.scale
    sw, sh = scaled_size(paint_size, scale)
    if sw > region.w or sh > region.h:
        scale = min(region.w / w, region.h / h)
        sw, sh = scaled_size(paint_size, scale)
        # guard against rounding pushing the size back over the region
        while sw > region.w or sh > region.h:
            scale = scale * 0.999
            sw, sh = scaled_size(paint_size, scale)
    ax = min(max(placement.anchor_x, region.x), region.x2 - sw)
    ay = min(max(placement.anchor_y, region.y), region.y2 - sh)
    if ax == placement.anchor_x and ay == placement.anchor_y and scale == placement.scale:
        return placement
    return PaintPlacement(anchor_x=ax, anchor_y=ay, scale=scale)
