"""Paint assets: generation entry points and on-disk storage."""
from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from ..errors import NotFoundError, StorageError, ValidationError
from ..raster import Raster
from .clients import MAX_PAINT_SIZE, MIN_PAINT_SIZE, PromptRefiner, TextToImage


@dataclass(frozen=True)
class PaintAsset:
    asset_id: str
    raw_prompt: str
    refined_prompt: str
    image: Raster
    generator_name: str
    created_at: str  # ISO-8601 UTC

    def __post_init__(self):
        if self.image is not None:
            if not self.refined_prompt:
                raise ValidationError("an asset with an image needs a refined prompt")
            if self.image.channels != 4:
                raise ValidationError("paint images must carry an alpha channel")


def refine_prompt(raw_prompt: str, refiner: PromptRefiner) -> str:
    if not raw_prompt.strip():
        raise ValidationError("prompt must be non-empty")
    return refiner.refine(raw_prompt)


def generate_paint(refined_prompt: str, t2i: TextToImage,
                   size: tuple[int, int], raw_prompt: str = "") -> PaintAsset:
    if not refined_prompt.strip():
        raise ValidationError("refined prompt must be non-empty")
    w, h = size
    for dim in (w, h):
        if not MIN_PAINT_SIZE <= dim <= MAX_PAINT_SIZE:
            raise ValidationError(f"paint size {w}x{h} outside [{MIN_PAINT_SIZE}, {MAX_PAINT_SIZE}]")
    image = t2i.generate(refined_prompt, w, h)
    return PaintAsset(
        asset_id=secrets.token_hex(16),
        raw_prompt=raw_prompt,
        refined_prompt=refined_prompt,
        image=image,
        generator_name=t2i.name,
        created_at=datetime.now(timezone.utc).isoformat(),
    )


class AssetStore:
    """Directory of ``<asset_id>.png`` images with JSON metadata sidecars."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def store(self, asset: PaintAsset) -> str:
        # every store mints a fresh id, so re-storing never clobbers
        asset_id = secrets.token_hex(16)
        meta = {
            "asset_id": asset_id,
            "raw_prompt": asset.raw_prompt,
            "refined_prompt": asset.refined_prompt,
            "generator_name": asset.generator_name,
            "created_at": asset.created_at,
        }
        with self._lock:
            try:
                asset.image.save_png(self.root / f"{asset_id}.png")
                (self.root / f"{asset_id}.json").write_text(json.dumps(meta, indent=2))
            except OSError as exc:
                raise StorageError(f"cannot write asset {asset_id}: {exc}") from exc
        return asset_id

    def load(self, asset_id: str) -> PaintAsset:
        png = self.root / f"{asset_id}.png"
        meta_path = self.root / f"{asset_id}.json"
        if not png.exists() or not meta_path.exists():
            raise NotFoundError(f"unknown asset {asset_id!r}")
        meta = json.loads(meta_path.read_text())
        return PaintAsset(
            asset_id=meta["asset_id"],
            raw_prompt=meta["raw_prompt"],
            refined_prompt=meta["refined_prompt"],
            image=Raster.load_png(png),
            generator_name=meta["generator_name"],
            created_at=meta["created_at"],
        )

    def exists(self, asset_id: str) -> bool:
        return (self.root / f"{asset_id}.png").exists()
