"""HTTP API wiring the catalog, paint generation, cloth editing, and try-on
model into one session-oriented service."""
from __future__ import annotations

import threading
from pathlib import Path
from typing import Optional

import numpy as np
import torch
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from PIL import Image
from pydantic import BaseModel, Field

from ..clothedit import render_design
from ..clothedit.edges import DEFAULT_EDGE_THRESHOLD
from ..core import PatternCatalog, apply_design_update, create_session, load_catalog
from ..core.catalog import write_seed_catalog
from ..errors import (
    BackendUnavailableError,
    InvalidStateError,
    MyClothError,
    NotFoundError,
    RevisionConflictError,
    ValidationError,
)
from ..paint import AssetStore, GeneratorClientConfig, generate_paint, make_clients, refine_prompt
from ..raster import Raster
from .avatars import AvatarSpec, get_avatar, load_avatars, write_seed_avatars
from .runner import TryOnRunner, load_backend
from .store import (
    QuarantinedError,
    RenderCache,
    SessionStore,
    new_record,
    record_to_dict,
)

DEFAULT_PAINT_SIZE = (128, 128)


class CreateSessionBody(BaseModel):
    pattern_id: str


class PaintBody(BaseModel):
    prompt: str


class PlacementBody(BaseModel):
    anchor_x: int
    anchor_y: int
    scale: float = Field(gt=0)


class DesignPatchBody(BaseModel):
    expected_revision: int
    target_color: Optional[list[int]] = None
    paint_asset_id: Optional[str] = None
    placement: Optional[PlacementBody] = None


class TryOnBody(BaseModel):
    avatar_id: str


class StudioService:
    """Service facade shared by the HTTP layer and the CLI."""

    def __init__(self, data_dir: str | Path, paint_backend: str = "mock",
                 checkpoint: Optional[str] = None,
                 edge_threshold: float = DEFAULT_EDGE_THRESHOLD,
                 tryon_workers: int = 1):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        patterns_dir = self.data_dir / "patterns"
        if not (patterns_dir / "manifest.json").exists():
            write_seed_catalog(patterns_dir)
        self.catalog: PatternCatalog = load_catalog(patterns_dir)
        avatars_dir = self.data_dir / "avatars"
        if not (avatars_dir / "manifest.json").exists():
            write_seed_avatars(avatars_dir)
        self.avatars: list[AvatarSpec] = load_avatars(avatars_dir)
        self.assets = AssetStore(self.data_dir / "assets")
        self.sessions = SessionStore(self.data_dir / "sessions")
        self.render_cache = RenderCache()
        self.edge_threshold = edge_threshold
        config = GeneratorClientConfig(backend=paint_backend)
        self.refiner, self.t2i = make_clients(config)
        self.runner = TryOnRunner(load_backend(checkpoint), workers=tryon_workers)
        self._session_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- session operations -------------------------------------------------

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._session_locks.setdefault(session_id, threading.Lock())

    def create(self, pattern_id: str) -> dict:
        state = create_session(self.catalog, pattern_id)
        record = new_record(state)
        self.sessions.save(record)
        return record_to_dict(record)

    def get_session(self, session_id: str) -> dict:
        return record_to_dict(self.sessions.load(session_id))

    def patch_design(self, session_id: str, body: DesignPatchBody,
                     fields_set: set[str]) -> dict:
        with self._lock_for(session_id):
            record = self.sessions.load(session_id)
            state = record.state
            if body.expected_revision != state.revision:
                raise RevisionConflictError(
                    f"expected revision {body.expected_revision}, have {state.revision}")
            pattern = self.catalog.get(state.pattern_id)
            kwargs = {}
            if "target_color" in fields_set:
                kwargs["target_color"] = tuple(body.target_color) if body.target_color else None
            if "paint_asset_id" in fields_set:
                if body.paint_asset_id is not None and not self.assets.exists(body.paint_asset_id):
                    raise NotFoundError(f"unknown asset {body.paint_asset_id!r}")
                kwargs["paint_asset_id"] = body.paint_asset_id
            if "placement" in fields_set and body.placement is not None:
                asset_id = kwargs.get("paint_asset_id", state.paint_asset_id)
                if asset_id is None:
                    raise InvalidStateError("cannot place a paint before one is attached")
                paint = self.assets.load(asset_id).image
                kwargs["placement"] = (body.placement.anchor_x, body.placement.anchor_y,
                                       body.placement.scale)
                kwargs["paint_size"] = (paint.width, paint.height)
            elif "placement" in fields_set:
                kwargs["placement"] = None
            new_state = apply_design_update(state, pattern, **kwargs)
            record = record.touched(new_state)
            self.sessions.save(record)
            return record_to_dict(record)

    # -- paints --------------------------------------------------------------

    def make_paint(self, session_id: str, prompt: str) -> dict:
        self.sessions.load(session_id)  # 404 for unknown sessions
        refined = refine_prompt(prompt, self.refiner)
        asset = generate_paint(refined, self.t2i, DEFAULT_PAINT_SIZE, raw_prompt=prompt)
        asset_id = self.assets.store(asset)
        return {"asset_id": asset_id, "refined_prompt": refined,
                "image_url": f"/api/assets/{asset_id}.png"}

    # -- rendering ------------------------------------------------------------

    def render_png(self, session_id: str) -> bytes:
        record = self.sessions.load(session_id)
        key = self.render_cache.key(session_id, record.state.revision)
        cached = self.render_cache.get(key)
        if cached is not None:
            return cached
        png = self.render_raster(record.state).to_png_bytes()
        self.render_cache.put(key, png)
        return png

    def render_raster(self, state) -> Raster:
        pattern = self.catalog.get(state.pattern_id)
        paint = self.assets.load(state.paint_asset_id).image if state.paint_asset_id else None
        return render_design(state, pattern, paint=paint,
                             edge_threshold=self.edge_threshold)

    # -- try-on ---------------------------------------------------------------

    def tryon_png(self, session_id: str, avatar_id: str) -> bytes:
        if not self.runner.available:
            raise BackendUnavailableError("no try-on checkpoint loaded")
        record = self.sessions.load(session_id)
        avatar = get_avatar(self.avatars, avatar_id)
        rendered = self.render_raster(record.state)
        person = Raster.load_png(avatar.person_path)
        cloth = _raster_to_unit(rendered, (person.height, person.width))
        sample = avatar.load_sample(cloth)
        return self.runner.run(sample).to_png_bytes()


def _raster_to_unit(raster: Raster, size: tuple[int, int]) -> torch.Tensor:
    img = Image.fromarray(raster.to_array(), mode="RGB")
    h, w = size
    arr = np.asarray(img.resize((w, h), Image.BILINEAR), dtype=np.float32) / 255.0
    return torch.from_numpy(arr.transpose(2, 0, 1)) * 2 - 1


def _error_status(exc: MyClothError) -> int:
    if isinstance(exc, RevisionConflictError):
        return 409
    if isinstance(exc, QuarantinedError):
        return 410
    if isinstance(exc, NotFoundError):
        return 404
    if isinstance(exc, BackendUnavailableError):
        return 502 if "checkpoint" not in str(exc) else 503
    if isinstance(exc, (ValidationError, InvalidStateError)):
        return 400
    return 500


def create_app(service: StudioService) -> FastAPI:
    app = FastAPI(title="mycloth studio")
    app.state.service = service

    @app.exception_handler(MyClothError)
    async def handle_domain_error(request: Request, exc: MyClothError):
        return JSONResponse(status_code=_error_status(exc),
                            content={"detail": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def handle_body_error(request: Request, exc: RequestValidationError):
        fields = [{"field": ".".join(str(p) for p in err["loc"][1:]) or "body",
                   "message": err["msg"]} for err in exc.errors()]
        return JSONResponse(status_code=400, content={"detail": fields})

    @app.get("/api/patterns")
    def list_patterns():
        return [
            {"id": p.pattern_id, "name": p.display_name,
             "thumbnail_url": f"/api/patterns/{p.pattern_id}/thumbnail",
             "printable_region": {"x": p.printable_region.x, "y": p.printable_region.y,
                                  "w": p.printable_region.w, "h": p.printable_region.h}}
            for p in service.catalog.list_patterns()
        ]

    @app.get("/api/patterns/{pattern_id}/thumbnail")
    def pattern_thumbnail(pattern_id: str):
        pattern = service.catalog.get(pattern_id)
        return Response(content=pattern.base_image.to_png_bytes(), media_type="image/png")

    @app.post("/api/sessions", status_code=201)
    def create_session_ep(body: CreateSessionBody):
        return service.create(body.pattern_id)

    @app.get("/api/sessions/{session_id}")
    def get_session_ep(session_id: str):
        return service.get_session(session_id)

    @app.post("/api/sessions/{session_id}/paint")
    def paint_ep(session_id: str, body: PaintBody):
        return service.make_paint(session_id, body.prompt)

    @app.patch("/api/sessions/{session_id}/design")
    def patch_ep(session_id: str, body: DesignPatchBody):
        return service.patch_design(session_id, body, body.model_fields_set)

    @app.get("/api/sessions/{session_id}/render")
    def render_ep(session_id: str):
        return Response(content=service.render_png(session_id), media_type="image/png")

    @app.get("/api/assets/{asset_id}.png")
    def asset_ep(asset_id: str):
        asset = service.assets.load(asset_id)
        return Response(content=asset.image.to_png_bytes(), media_type="image/png")

    @app.get("/api/avatars")
    def avatars_ep():
        return [{"avatar_id": a.avatar_id,
                 "preview_url": f"/api/avatars/{a.avatar_id}/preview"}
                for a in service.avatars]

    @app.get("/api/avatars/{avatar_id}/preview")
    def avatar_preview_ep(avatar_id: str):
        avatar = get_avatar(service.avatars, avatar_id)
        return Response(content=avatar.person_path.read_bytes(), media_type="image/png")

    @app.post("/api/sessions/{session_id}/tryon")
    def tryon_ep(session_id: str, body: TryOnBody):
        return Response(content=service.tryon_png(session_id, body.avatar_id),
                        media_type="image/png")

    return app
