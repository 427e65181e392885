"""Pattern catalog: designer-provided garment templates loaded from disk.

Layout: ``<root>/manifest.json`` plus ``<root>/<pattern_id>/base.png`` and
``<root>/<pattern_id>/mask.png``. The manifest lists ids, display names, and
printable regions.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError, NotFoundError
from ..raster import Raster
from .types import PatternSpec, Rect


class PatternCatalog:
    """Immutable view of the patterns found in one catalog directory."""

    def __init__(self, patterns: list[PatternSpec]):
        self._by_id = {p.pattern_id: p for p in sorted(patterns, key=lambda p: p.pattern_id)}

    def list_patterns(self) -> list[PatternSpec]:
        return list(self._by_id.values())

    def get(self, pattern_id: str) -> PatternSpec:
        try:
            return self._by_id[pattern_id]
        except KeyError:
            raise NotFoundError(f"unknown pattern {pattern_id!r}") from None

    def __len__(self) -> int:
        return len(self._by_id)


def load_catalog(root: str | Path) -> PatternCatalog:
    root = Path(root)
    if not root.is_dir():
        raise ConfigurationError(f"catalog directory {root} does not exist")
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        # An empty directory is a valid empty catalog.
        if not any(root.iterdir()):
            return PatternCatalog([])
        raise ConfigurationError(f"catalog manifest {manifest_path} is missing")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"malformed manifest {manifest_path}: {exc}") from exc

    entries = manifest.get("patterns")
    if not isinstance(entries, list):
        raise ConfigurationError(f"manifest {manifest_path} lacks a 'patterns' list")

    patterns = []
    for entry in entries:
        try:
            pid = entry["id"]
            name = entry.get("name", pid)
            region = Rect(*entry["printable_region"])
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"malformed manifest entry {entry!r}: {exc}") from exc
        base_path = root / pid / "base.png"
        mask_path = root / pid / "mask.png"
        for p in (base_path, mask_path):
            if not p.exists():
                raise ConfigurationError(f"pattern {pid!r} references missing file {p}")
        patterns.append(
            PatternSpec(
                pattern_id=pid,
                display_name=name,
                base_image=Raster.load_png(base_path),
                cloth_mask=Raster.load_png(mask_path).require_mask(),
                printable_region=region,
            )
        )
    return PatternCatalog(patterns)


# -- seed catalog -----------------------------------------------------------

_SEED_COLORS = {
    "classic-crew": ((235, 235, 235), "Classic Crew"),
    "midnight-tee": ((40, 44, 66), "Midnight Tee"),
    "sunset-tee": ((214, 120, 60), "Sunset Tee"),
}


def _draw_shirt(size: int, color: tuple[int, int, int]) -> tuple[Raster, Raster, Rect]:
    """Procedural flat T-shirt image, its cloth mask, and a chest print region."""
    h = w = size
    mask = np.zeros((h, w), dtype=bool)
    body_x0, body_x1 = int(w * 0.28), int(w * 0.72)
    body_y0, body_y1 = int(h * 0.18), int(h * 0.92)
    mask[body_y0:body_y1, body_x0:body_x1] = True
    sleeve_y1 = int(h * 0.42)
    mask[body_y0:sleeve_y1, int(w * 0.12):body_x0] = True
    mask[body_y0:sleeve_y1, body_x1:int(w * 0.88)] = True
    # neckline notch
    neck_r = int(w * 0.08)
    cx = w // 2
    yy, xx = np.mgrid[0:h, 0:w]
    mask &= ~((xx - cx) ** 2 + (yy - body_y0) ** 2 < neck_r ** 2)

    img = np.full((h, w, 3), 250, dtype=np.uint8)
    base = np.array(color, dtype=np.int32)
    # mild vertical shading so recoloring has structure to preserve
    shade = ((yy - body_y0) / max(1, body_y1 - body_y0) * 18).astype(np.int32)
    shirt = np.clip(base[None, None, :] - shade[:, :, None], 0, 255).astype(np.uint8)
    img[mask] = shirt[mask]

    region = Rect(int(w * 0.34), int(h * 0.36), int(w * 0.32), int(h * 0.34))
    mask_u8 = np.where(mask, 255, 0).astype(np.uint8)
    return Raster.from_array(img), Raster.from_array(mask_u8), region


def write_seed_catalog(root: str | Path, size: int = 192) -> PatternCatalog:
    """Generate the bundled three-pattern catalog into ``root``."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    for pid, (color, name) in sorted(_SEED_COLORS.items()):
        base, mask, region = _draw_shirt(size, color)
        pdir = root / pid
        pdir.mkdir(exist_ok=True)
        base.save_png(pdir / "base.png")
        mask.save_png(pdir / "mask.png")
        entries.append({
            "id": pid,
            "name": name,
            "printable_region": [region.x, region.y, region.w, region.h],
        })
    (root / "manifest.json").write_text(json.dumps({"patterns": entries}, indent=2))
    return load_catalog(root)
