"""Session lifecycle: creation and revisioned design updates."""
from __future__ import annotations

import secrets
from typing import Optional

from ..errors import InvalidStateError
from .catalog import PatternCatalog
from .types import ColorRGB, DesignState, PaintPlacement, PatternSpec

_UNSET = object()


def new_session_id() -> str:
    return secrets.token_hex(16)


def create_session(catalog: PatternCatalog, pattern_id: str) -> DesignState:
    catalog.get(pattern_id)  # raises NotFoundError for unknown ids
    return DesignState(session_id=new_session_id(), pattern_id=pattern_id)


def apply_design_update(
    state: DesignState,
    pattern: PatternSpec,
    *,
    target_color=_UNSET,
    paint_asset_id=_UNSET,
    placement=_UNSET,
    paint_size: Optional[tuple[int, int]] = None,
) -> DesignState:
    """Return a new state with the given fields changed and revision bumped.

    Placement values are clamped to the pattern's printable region before
    being stored; ``paint_size`` is the native (w, h) of the referenced paint.
    """
    changes: dict = {}
    if target_color is not _UNSET:
        if target_color is not None and not isinstance(target_color, ColorRGB):
            target_color = ColorRGB(*target_color)
        changes["target_color"] = target_color
    if paint_asset_id is not _UNSET:
        changes["paint_asset_id"] = paint_asset_id
        if paint_asset_id is None:
            changes.setdefault("placement", None)
    if placement is not _UNSET and placement is not None:
        effective_asset = changes.get("paint_asset_id", state.paint_asset_id)
        if effective_asset is None:
            raise InvalidStateError("cannot place a paint before one is attached")
        if paint_size is None:
            raise InvalidStateError("paint_size required to clamp a placement")
        from ..clothedit.placement import clamp_placement

        if not isinstance(placement, PaintPlacement):
            placement = PaintPlacement(*placement)
        changes["placement"] = clamp_placement(placement, paint_size, pattern.printable_region)
    elif placement is None:
        changes["placement"] = None
    return state.bumped(**changes)
