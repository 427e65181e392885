"""Domain value types for the customization session."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from ..errors import InvalidStateError, ValidationError
from ..raster import Raster


@dataclass(frozen=True)
class ColorRGB:
    r: int
    g: int
    b: int

    def __post_init__(self):
        for name in ("r", "g", "b"):
            v = getattr(self, name)
            if not isinstance(v, int) or not 0 <= v <= 255:
                raise ValidationError(f"channel {name}={v} outside [0, 255]")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.r, self.g, self.b)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle in pixel coordinates."""
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValidationError(f"rect must have positive size, got {self.w}x{self.h}")

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h


@dataclass(frozen=True)
class PatternSpec:
    pattern_id: str
    display_name: str
    base_image: Raster
    cloth_mask: Raster
    printable_region: Rect

    def __post_init__(self):
        if self.base_image.channels != 3:
            raise ValidationError("base_image must be RGB")
        self.cloth_mask.require_mask()
        if (self.cloth_mask.width, self.cloth_mask.height) != (self.base_image.width, self.base_image.height):
            raise ValidationError("cloth_mask dimensions must match base_image")
        r = self.printable_region
        if r.x < 0 or r.y < 0 or r.x2 > self.base_image.width or r.y2 > self.base_image.height:
            raise ValidationError("printable_region escapes image bounds")
        mask = self.cloth_mask.to_array()[:, :, 0]
        if not (mask[r.y:r.y2, r.x:r.x2] == 255).all():
            raise ValidationError("printable_region must lie inside the cloth mask")


@dataclass(frozen=True)
class PaintPlacement:
    anchor_x: int
    anchor_y: int
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValidationError(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class DesignState:
    session_id: str
    pattern_id: str
    revision: int = 0
    target_color: Optional[ColorRGB] = None
    paint_asset_id: Optional[str] = None
    placement: Optional[PaintPlacement] = None

    def __post_init__(self):
        if self.placement is not None and self.paint_asset_id is None:
            raise InvalidStateError("placement requires a paint asset")

    def bumped(self, **changes) -> "DesignState":
        return replace(self, revision=self.revision + 1, **changes)
