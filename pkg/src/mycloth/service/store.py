"""Session persistence: one JSON document per session, atomic replace."""
from __future__ import annotations

import json
import logging
import os
import tempfile
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from ..core.types import ColorRGB, DesignState, PaintPlacement
from ..errors import NotFoundError, StorageError

log = logging.getLogger(__name__)


class QuarantinedError(StorageError):
    """The stored session document was corrupt and has been quarantined."""


@dataclass(frozen=True)
class SessionRecord:
    state: DesignState
    created_at: str
    updated_at: str
    render_cache_key: Optional[str] = None

    def touched(self, state: DesignState, cache_key: Optional[str] = None) -> "SessionRecord":
        return replace(self, state=state,
                       updated_at=datetime.now(timezone.utc).isoformat(),
                       render_cache_key=cache_key)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def new_record(state: DesignState) -> SessionRecord:
    now = _now()
    return SessionRecord(state=state, created_at=now, updated_at=now)


def record_to_dict(record: SessionRecord) -> dict:
    s = record.state
    return {
        "session_id": s.session_id,
        "pattern_id": s.pattern_id,
        "revision": s.revision,
        "target_color": list(s.target_color.as_tuple()) if s.target_color else None,
        "paint_asset_id": s.paint_asset_id,
        "placement": {
            "anchor_x": s.placement.anchor_x,
            "anchor_y": s.placement.anchor_y,
            "scale": s.placement.scale,
        } if s.placement else None,
        "created_at": record.created_at,
        "updated_at": record.updated_at,
        "render_cache_key": record.render_cache_key,
    }


def record_from_dict(data: dict) -> SessionRecord:
    placement = data.get("placement")
    color = data.get("target_color")
    state = DesignState(
        session_id=data["session_id"],
        pattern_id=data["pattern_id"],
        revision=data["revision"],
        target_color=ColorRGB(*color) if color else None,
        paint_asset_id=data.get("paint_asset_id"),
        placement=PaintPlacement(**placement) if placement else None,
    )
    return SessionRecord(state=state, created_at=data["created_at"],
                         updated_at=data["updated_at"],
                         render_cache_key=data.get("render_cache_key"))


class SessionStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.json"

    def save(self, record: SessionRecord) -> None:
        """Write-temp-then-rename so a crash never leaves a torn document."""
        path = self._path(record.state.session_id)
        payload = json.dumps(record_to_dict(record), indent=2)
        try:
            fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp_", suffix=".json")
            with os.fdopen(fd, "w") as fh:
                fh.write(payload)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except OSError as exc:
            raise StorageError(f"cannot persist session {record.state.session_id}: {exc}") from exc

    def load(self, session_id: str) -> SessionRecord:
        path = self._path(session_id)
        if not path.exists():
            raise NotFoundError(f"unknown session {session_id!r}")
        try:
            return record_from_dict(json.loads(path.read_text()))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            quarantine = path.with_suffix(".corrupt")
            os.replace(path, quarantine)
            log.error("session %s corrupt, quarantined to %s: %s", session_id, quarantine, exc)
            raise QuarantinedError(f"session {session_id} was corrupt and quarantined") from exc

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json") if not p.name.startswith(".tmp_"))


class RenderCache:
    """Bounded in-memory PNG cache keyed by (session, revision, pipeline rev)."""

    PIPELINE_VERSION = "1"

    def __init__(self, max_entries: int = 64):
        self.max_entries = max_entries
        self._entries: dict[str, bytes] = {}
        self._lock = threading.Lock()

    def key(self, session_id: str, revision: int) -> str:
        return f"{session_id}:{revision}:{self.PIPELINE_VERSION}"

    def get(self, key: str) -> Optional[bytes]:
        with self._lock:
            return self._entries.get(key)

    def put(self, key: str, png: bytes) -> None:
        with self._lock:
            if len(self._entries) >= self.max_entries:
                self._entries.pop(next(iter(self._entries)))
            self._entries[key] = png
