"""Paint compositing and the full design rendering pipeline."""
from __future__ import annotations

import numpy as np
from PIL import Image

from ..core.types import DesignState, PaintPlacement, PatternSpec
from ..errors import ValidationError
from ..raster import Raster
from .color import RecolorParams, compute_main_color, recolor
from .edges import DEFAULT_EDGE_THRESHOLD, detect_edges
from .placement import scaled_size


def resize_paint(paint: Raster, size: tuple[int, int]) -> Raster:
    """Bilinear resize of an RGBA paint to an exact pixel size."""
    if paint.channels != 4:
        raise ValidationError("paint must be RGBA")
    img = Image.fromarray(paint.to_array(), mode="RGBA")
    resized = img.resize(size, Image.BILINEAR)
    return Raster.from_array(np.asarray(resized, dtype=np.uint8))


def composite_paint(base: Raster, paint: Raster, placement: PaintPlacement) -> Raster:
    """Alpha-composite the scaled paint over the base image at the anchor."""
    if base.channels != 3:
        raise ValidationError("base must be RGB")
    sw, sh = scaled_size((paint.width, paint.height), placement.scale)
    x0, y0 = placement.anchor_x, placement.anchor_y
    if x0 < 0 or y0 < 0 or x0 + sw > base.width or y0 + sh > base.height:
        raise ValidationError("placement escapes the base image; clamp it first")

    scaled = resize_paint(paint, (sw, sh)).to_array().astype(np.float64)
    out = base.to_array().astype(np.float64)
    alpha = scaled[:, :, 3:4] / 255.0
    region = out[y0:y0 + sh, x0:x0 + sw, :]
    out[y0:y0 + sh, x0:x0 + sw, :] = alpha * scaled[:, :, :3] + (1.0 - alpha) * region
    return Raster.from_array(np.clip(np.round(out), 0, 255).astype(np.uint8))


def render_design(
    state: DesignState,
    pattern: PatternSpec,
    paint: Raster | None = None,
    edge_threshold: float = DEFAULT_EDGE_THRESHOLD,
) -> Raster:
    """base image -> recolor (if a target color is set) -> composite paint
    (if placed). Pure in all inputs."""
    image = pattern.base_image
    if state.target_color is not None:
        main = compute_main_color(image, pattern.cloth_mask)
        edges = detect_edges(image, pattern.cloth_mask, threshold=edge_threshold)
        image = recolor(image, pattern.cloth_mask, edges,
                        RecolorParams(main_color=main, target_color=state.target_color))
    if state.placement is not None:
        if paint is None:
            raise ValidationError("state has a placement but no paint was supplied")
        image = composite_paint(image, paint, state.placement)
    return image
