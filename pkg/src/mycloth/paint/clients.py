"""Prompt refinement and text-to-image clients.

Two backends per role: a deterministic in-process mock (default; used by the
test suite and offline demos) and a remote HTTP client speaking an
OpenAI-compatible chat shape / a JSON text-to-image shape.
"""
from __future__ import annotations

import base64
import hashlib
import os
from dataclasses import dataclass, field
from typing import Optional, Protocol

import httpx
import numpy as np

from ..errors import BackendUnavailableError, ValidationError
from ..raster import Raster

MIN_PAINT_SIZE = 64
MAX_PAINT_SIZE = 2048

REFINEMENT_INSTRUCTION = (
    "Rewrite the following T-shirt design theme as one detailed visual "
    "description of a print, mentioning subject, style, and color palette"
)

MOCK_STYLE_SUFFIX = "detailed vector print, bold shapes, balanced color palette"


@dataclass(frozen=True)
class GeneratorClientConfig:
    backend: str = "mock"  # "mock" or "remote"
    chat_endpoint: str = ""
    t2i_endpoint: str = ""
    chat_model: str = "gpt-3.5-turbo"
    auth_token_env: str = "MYCLOTH_BACKEND_TOKEN"  # env var NAME, never the secret
    timeout_s: float = 30.0
    retry_count: int = 2

    def __post_init__(self):
        if self.backend not in ("mock", "remote"):
            raise ValidationError(f"unknown backend {self.backend!r}")
        if not self.timeout_s > 0:
            raise ValidationError("timeout must be positive")
        if not 0 <= self.retry_count <= 5:
            raise ValidationError("retry count must be in [0, 5]")


class PromptRefiner(Protocol):
    name: str

    def refine(self, raw_prompt: str) -> str: ...


class TextToImage(Protocol):
    name: str

    def generate(self, prompt: str, width: int, height: int) -> Raster: ...


# -- mock backends ----------------------------------------------------------

class MockPromptRefiner:
    """Pure-function stand-in for the chat backend."""

    name = "mock-refiner"

    def refine(self, raw_prompt: str) -> str:
        return f"t-shirt print design, {raw_prompt.strip()}, {MOCK_STYLE_SUFFIX}"


def _prompt_seed(prompt: str) -> int:
    digest = hashlib.sha256(prompt.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _value_noise(rng: np.random.Generator, width: int, height: int) -> np.ndarray:
    """Multi-octave value noise in [0, 1]."""
    acc = np.zeros((height, width))
    total = 0.0
    for octave, cells in enumerate((4, 8, 16)):
        grid = rng.random((cells + 1, cells + 1))
        ys = np.linspace(0, cells, height)
        xs = np.linspace(0, cells, width)
        y0 = np.minimum(ys.astype(int), cells - 1)
        x0 = np.minimum(xs.astype(int), cells - 1)
        fy = (ys - y0)[:, None]
        fx = (xs - x0)[None, :]
        g00 = grid[np.ix_(y0, x0)]
        g01 = grid[np.ix_(y0, x0 + 1)]
        g10 = grid[np.ix_(y0 + 1, x0)]
        g11 = grid[np.ix_(y0 + 1, x0 + 1)]
        layer = (g00 * (1 - fy) * (1 - fx) + g01 * (1 - fy) * fx
                 + g10 * fy * (1 - fx) + g11 * fy * fx)
        weight = 0.5 ** octave
        acc += weight * layer
        total += weight
    return acc / total


class MockTextToImage:
    """Procedural paint generator: prompt-hash-seeded value noise with a
    palette and a circular alpha vignette. Same prompt, same bytes."""

    name = "mock-diffusion"

    def generate(self, prompt: str, width: int, height: int) -> Raster:
        rng = np.random.default_rng(_prompt_seed(prompt))
        noise = _value_noise(rng, width, height)
        palette = rng.integers(0, 256, size=(4, 3))
        idx = np.minimum((noise * len(palette)).astype(int), len(palette) - 1)
        rgb = palette[idx].astype(np.uint8)

        yy, xx = np.mgrid[0:height, 0:width]
        cx, cy = (width - 1) / 2, (height - 1) / 2
        r = np.hypot((xx - cx) / max(cx, 1), (yy - cy) / max(cy, 1))
        alpha = np.clip((1.15 - r) / 0.3, 0.0, 1.0)
        rgba = np.dstack([rgb, np.round(alpha * 255).astype(np.uint8)])
        return Raster.from_array(rgba)


# -- remote backends --------------------------------------------------------

def _auth_headers(config: GeneratorClientConfig) -> dict[str, str]:
    token = os.environ.get(config.auth_token_env, "")
    return {"Authorization": f"Bearer {token}"} if token else {}


@dataclass
class _RemoteBase:
    config: GeneratorClientConfig
    transport: Optional[httpx.BaseTransport] = field(default=None, repr=False)

    def _post(self, url: str, payload: dict) -> dict:
        attempts = 1 + self.config.retry_count
        last_exc: Exception | None = None
        with httpx.Client(transport=self.transport, timeout=self.config.timeout_s) as client:
            for _ in range(attempts):
                try:
                    resp = client.post(url, json=payload, headers=_auth_headers(self.config))
                    resp.raise_for_status()
                    return resp.json()
                except (httpx.HTTPError, ValueError) as exc:
                    last_exc = exc
        raise BackendUnavailableError(f"backend at {url} failed after {attempts} attempts") from last_exc


class RemotePromptRefiner(_RemoteBase):
    name = "remote-chat"

    def refine(self, raw_prompt: str) -> str:
        body = {
            "model": self.config.chat_model,
            "messages": [
                {"role": "system", "content": REFINEMENT_INSTRUCTION},
                {"role": "user", "content": raw_prompt},
            ],
        }
        data = self._post(self.config.chat_endpoint, body)
        try:
            return data["choices"][0]["message"]["content"].strip()
        except (KeyError, IndexError, AttributeError) as exc:
            raise BackendUnavailableError(f"malformed chat response: {exc}") from exc


class RemoteTextToImage(_RemoteBase):
    name = "remote-diffusion"

    def generate(self, prompt: str, width: int, height: int) -> Raster:
        body = {"prompt": prompt, "width": width, "height": height,
                "seed": _prompt_seed(prompt) % (2 ** 31)}
        data = self._post(self.config.t2i_endpoint, body)
        try:
            blob = base64.b64decode(data["image"])
        except (KeyError, ValueError) as exc:
            raise BackendUnavailableError(f"malformed image response: {exc}") from exc
        raster = Raster.from_png_bytes(blob)
        if raster.channels == 3:
            # diffusion outputs are RGB; composite fully opaque (no matting)
            arr = raster.to_array()
            alpha = np.full(arr.shape[:2] + (1,), 255, dtype=np.uint8)
            raster = Raster.from_array(np.concatenate([arr, alpha], axis=2))
        return raster


def make_clients(config: GeneratorClientConfig,
                 transport: Optional[httpx.BaseTransport] = None):
    """Build the (refiner, text-to-image) pair for a config."""
    if config.backend == "mock":
        return MockPromptRefiner(), MockTextToImage()
    return RemotePromptRefiner(config, transport), RemoteTextToImage(config, transport)
