"""Edge detection over the garment region, used to pin boundary colors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import ValidationError
from ..raster import Raster

DEFAULT_EDGE_THRESHOLD = 48.0

SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
SOBEL_Y = SOBEL_X.T


@dataclass(frozen=True)
class EdgeMask:
    mask: Raster

    def __post_init__(self):
        self.mask.require_mask()

    def to_bool(self) -> np.ndarray:
        return self.mask.to_array()[:, :, 0] == 255


def luminance(rgb: np.ndarray) -> np.ndarray:
    return 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]


def denoise_masked(image: Raster, cloth_mask: Raster) -> np.ndarray:
    """3x3 median filter applied only inside the cloth mask.

    Returns a float64 (H, W, 3) array; pixels outside the mask are untouched.
    Used to stabilize color statistics and gradients, never for output pixels.
    """
    arr = image.to_array().astype(np.float64)
    inside = cloth_mask.to_array()[:, :, 0] == 255
    out = arr.copy()
    for c in range(arr.shape[2]):
        filtered = ndimage.median_filter(arr[:, :, c], size=3, mode="nearest")
        out[:, :, c] = np.where(inside, filtered, arr[:, :, c])
    return out


def detect_edges(image: Raster, cloth_mask: Raster, threshold: float = DEFAULT_EDGE_THRESHOLD) -> EdgeMask:
    """Edge pixels: inside the mask and either adjacent to a non-mask pixel
    (4-neighborhood, image border counts as outside) or with Sobel luminance
    gradient magnitude above ``threshold``."""
    if (image.width, image.height) != (cloth_mask.width, cloth_mask.height):
        raise ValidationError("image and mask dimensions differ")
    cloth_mask.require_mask()
    inside = cloth_mask.to_array()[:, :, 0] == 255

    padded = np.pad(inside, 1, mode="constant", constant_values=False)
    boundary = inside & ~(
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )

    lum = luminance(denoise_masked(image, cloth_mask))
    gx = ndimage.convolve(lum, SOBEL_X, mode="nearest")
    gy = ndimage.convolve(lum, SOBEL_Y, mode="nearest")
    strong = np.hypot(gx, gy) > threshold

    edges = inside & (boundary | strong)
    mask_u8 = np.where(edges, 255, 0).astype(np.uint8)
    return EdgeMask(Raster.from_array(mask_u8))
