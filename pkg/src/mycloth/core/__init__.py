from .catalog import PatternCatalog, load_catalog, write_seed_catalog
from .session import apply_design_update, create_session, new_session_id
from .types import ColorRGB, DesignState, PaintPlacement, PatternSpec, Rect

__all__ = [
    "ColorRGB",
    "DesignState",
    "PaintPlacement",
    "PatternCatalog",
    "PatternSpec",
    "Rect",
    "apply_design_update",
    "create_session",
    "load_catalog",
    "new_session_id",
    "write_seed_catalog",
]
