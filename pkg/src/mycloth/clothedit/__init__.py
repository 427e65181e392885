from .color import RecolorParams, compute_main_color, recolor
from .compose import composite_paint, render_design, resize_paint
from .edges import DEFAULT_EDGE_THRESHOLD, EdgeMask, denoise_masked, detect_edges
from .placement import clamp_placement, scaled_size

__all__ = [
    "DEFAULT_EDGE_THRESHOLD",
    "EdgeMask",
    "RecolorParams",
    "clamp_placement",
    "composite_paint",
    "compute_main_color",
    "denoise_masked",
    "detect_edges",
    "recolor",
    "render_design",
    "resize_paint",
    "scaled_size",
]
