"""Try-on inference behind a bounded worker pool."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Protocol

import numpy as np
import torch

from ..raster import Raster
from ..traineval.data import TryOnSample
from ..traineval.train import load_checkpoint


class TryOnBackend(Protocol):
    def infer(self, sample: TryOnSample) -> torch.Tensor: ...


class ModelBackend:
    def __init__(self, checkpoint_dir: str | Path):
        self.model, self.state = load_checkpoint(checkpoint_dir)
        self.model.eval()

    def infer(self, sample: TryOnSample) -> torch.Tensor:
        with torch.no_grad():
            return self.model(sample.cloth_image, sample.pose_map,
                              sample.agnostic_image).y_p


class IdentityBackend:
    """Deterministic stand-in: the cloth, warped by a zero flow (i.e. as-is),
    is composited into the agnostic image over the blanked garment region."""

    def infer(self, sample: TryOnSample) -> torch.Tensor:
        mask = sample.garment_mask() > 0  # (1, H, W)
        return torch.where(mask, sample.cloth_image, sample.agnostic_image)


def load_backend(checkpoint: Optional[str]) -> Optional[TryOnBackend]:
    if checkpoint is None:
        return None
    if checkpoint == "identity":
        return IdentityBackend()
    return ModelBackend(checkpoint)


class TryOnRunner:
    """Serializes inference through a small worker pool so concurrent HTTP
    requests cannot stack up model activations."""

    def __init__(self, backend: Optional[TryOnBackend], workers: int = 1):
        self.backend = backend
        self._pool = ThreadPoolExecutor(max_workers=workers)

    @property
    def available(self) -> bool:
        return self.backend is not None

    def run(self, sample: TryOnSample) -> Raster:
        future = self._pool.submit(self.backend.infer, sample)
        y_p = future.result()
        arr = ((y_p.detach().numpy().transpose(1, 2, 0) + 1) / 2 * 255)
        return Raster.from_array(arr.round().clip(0, 255).astype(np.uint8))

    def shutdown(self) -> None:
        self._pool.shutdown(wait=False)
