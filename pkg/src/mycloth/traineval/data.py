"""Datasets: the VITON-style on-disk layout and a procedural toy substitute.

The toy samples are stick figures wearing striped rectangles, built so the
ground truth is known exactly: the torso box of the person is replaced by the
resized cloth. See docs/dataset.md for the on-disk layout.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import torch
from PIL import Image

from ..errors import LoadError, ParseError, ValidationError

DEFAULT_RESOLUTION = (256, 192)  # (H, W)
TOY_RESOLUTION = (64, 64)
AGNOSTIC_FILL = 0.0  # gray used to blank the upper body, in [-1, 1]


@dataclass
class TryOnSample:
    cloth_image: torch.Tensor      # (3, H, W)
    person_image: torch.Tensor     # (3, H, W)
    pose_map: torch.Tensor         # (P, H, W)
    agnostic_image: torch.Tensor   # (3, H, W)
    ground_truth: Optional[torch.Tensor] = None  # (3, H, W)

    def __post_init__(self):
        tensors = [self.cloth_image, self.person_image, self.pose_map, self.agnostic_image]
        if self.ground_truth is not None:
            tensors.append(self.ground_truth)
        base = self.cloth_image.shape[-2:]
        for t in tensors:
            if t.shape[-2:] != base:
                raise ValidationError("all sample tensors must share spatial dims")
            if t.min() < -1 or t.max() > 1:
                raise ValidationError("sample values must lie in [-1, 1]")
        h, w = base
        if h % 32 or w % 32:
            raise ValidationError(f"sample dims {h}x{w} must be divisible by 32")

    def garment_mask(self, tol: float = 1e-3) -> torch.Tensor:
        """(1, H, W) mask of the region blanked out of the agnostic image."""
        diff = (self.person_image - self.agnostic_image).abs().amax(dim=0, keepdim=True)
        return (diff > tol).to(self.person_image.dtype)


@dataclass
class DatasetSplit:
    root: Optional[Path]
    pairs: list[tuple[str, str]]
    split: str
    resolution: tuple[int, int]
    loader: Callable[[str, str], TryOnSample] = field(repr=False)

    def __len__(self) -> int:
        return len(self.pairs)

    def get(self, index: int) -> TryOnSample:
        person_id, cloth_id = self.pairs[index]
        return self.loader(person_id, cloth_id)


# -- toy data ----------------------------------------------------------------

def _to_unit(arr: np.ndarray) -> torch.Tensor:
    """(H, W, C) float in [0, 1] -> (C, H, W) tensor in [-1, 1]."""
    return torch.from_numpy(np.ascontiguousarray(arr.transpose(2, 0, 1))).float() * 2 - 1


def _toy_sample(rng: np.random.Generator, size: int = TOY_RESOLUTION[0]) -> TryOnSample:
    h = w = size
    cloth_color = rng.uniform(0.2, 1.0, size=3)
    stripe_color = rng.uniform(0.0, 1.0, size=3)
    stripe_period = int(rng.integers(4, 9))

    # in-shop cloth photo: striped rectangle on white
    cloth = np.ones((h, w, 3))
    cx0, cy0, cx1, cy1 = w // 6, h // 6, w - w // 6, h - h // 6
    yy = np.arange(h)[:, None]
    stripes = ((yy // stripe_period) % 2).astype(bool)
    block = np.where(stripes[cy0:cy1, :, None], stripe_color, cloth_color)
    cloth[cy0:cy1, cx0:cx1] = block[:, : cx1 - cx0]

    # person: head, torso (wearing an old garment), legs on gray
    person = np.full((h, w, 3), 0.85)
    tx0, ty0 = int(w * 0.30) + int(rng.integers(-2, 3)), int(h * 0.28)
    tx1, ty1 = tx0 + int(w * 0.40), ty0 + int(h * 0.34)
    old_color = rng.uniform(0.0, 1.0, size=3)
    person[ty0:ty1, tx0:tx1] = old_color
    head_c = ((tx0 + tx1) // 2, ty0 - h // 10)
    ys, xs = np.mgrid[0:h, 0:w]
    head = (xs - head_c[0]) ** 2 + (ys - head_c[1]) ** 2 < (h // 12) ** 2
    person[head] = (0.9, 0.75, 0.6)
    legs = (ys >= ty1) & (ys < ty1 + h // 4) & (
        ((xs > tx0 + 2) & (xs < tx0 + 8)) | ((xs > tx1 - 8) & (xs < tx1 - 2))
    )
    person[legs] = (0.2, 0.2, 0.5)

    # agnostic: torso blanked to mid-gray
    agnostic = person.copy()
    agnostic[ty0:ty1, tx0:tx1] = (AGNOSTIC_FILL + 1) / 2

    # pose: head / torso / leg channels
    pose = np.zeros((h, w, 3))
    pose[head, 0] = 1.0
    spine = (np.abs(xs - (tx0 + tx1) // 2) < 2) & (ys >= ty0) & (ys < ty1)
    pose[spine, 1] = 1.0
    pose[legs, 2] = 1.0

    # ground truth: the cloth's printed block resized onto the torso box
    gt = person.copy()
    block_img = Image.fromarray((cloth[cy0:cy1, cx0:cx1] * 255).astype(np.uint8))
    resized = np.asarray(
        block_img.resize((tx1 - tx0, ty1 - ty0), Image.BILINEAR), dtype=np.float64
    ) / 255.0
    gt[ty0:ty1, tx0:tx1] = resized

    return TryOnSample(
        cloth_image=_to_unit(cloth),
        person_image=_to_unit(person),
        pose_map=_to_unit(pose),
        agnostic_image=_to_unit(agnostic),
        ground_truth=_to_unit(gt),
    )


def make_toy_dataset(n: int, seed: int = 0, size: int = TOY_RESOLUTION[0]) -> DatasetSplit:
    if n < 1:
        raise ValidationError("need at least one sample")
    samples = []
    for i in range(n):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        samples.append(_toy_sample(rng, size))

    def loader(person_id: str, cloth_id: str) -> TryOnSample:
        return samples[int(person_id)]

    pairs = [(str(i), str(i)) for i in range(n)]
    return DatasetSplit(root=None, pairs=pairs, split="toy",
                        resolution=(size, size), loader=loader)


# -- VITON-style layout ------------------------------------------------------

def _load_image(path: Path, resolution: tuple[int, int], channels: int = 3) -> torch.Tensor:
    if not path.exists():
        raise LoadError(f"missing dataset file {path}")
    img = Image.open(path).convert("RGB")
    h, w = resolution
    img = img.resize((w, h), Image.BILINEAR)
    arr = np.asarray(img, dtype=np.float64) / 255.0
    return _to_unit(arr)


def _pose_heatmaps(path: Path, resolution: tuple[int, int],
                   channels: int = 18, sigma: float = 3.0) -> torch.Tensor:
    if not path.exists():
        raise LoadError(f"missing pose annotation {path}")
    try:
        data = json.loads(path.read_text())
        keypoints = data["keypoints"]
    except (json.JSONDecodeError, KeyError) as exc:
        raise ParseError(f"malformed pose file {path}: {exc}") from exc
    h, w = resolution
    maps = np.zeros((channels, h, w))
    ys, xs = np.mgrid[0:h, 0:w]
    for i, kp in enumerate(keypoints[:channels]):
        x, y = kp[0], kp[1]
        if x < 0 or y < 0:
            continue
        maps[i] = np.exp(-((xs - x) ** 2 + (ys - y) ** 2) / (2 * sigma ** 2))
    return torch.from_numpy(maps).float() * 2 - 1


def load_viton(root: str | Path, split: str,
               resolution: tuple[int, int] = DEFAULT_RESOLUTION) -> DatasetSplit:
    root = Path(root)
    pair_file = root / f"{split}_pairs.txt"
    if not pair_file.exists():
        raise LoadError(f"missing pair list {pair_file}")
    pairs: list[tuple[str, str]] = []
    for lineno, line in enumerate(pair_file.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"{pair_file}:{lineno}: expected two columns, got {line!r}")
        pairs.append((parts[0], parts[1]))

    base = root / split

    def loader(person_id: str, cloth_id: str) -> TryOnSample:
        person = _load_image(base / "image" / person_id, resolution)
        cloth = _load_image(base / "cloth" / cloth_id, resolution)
        stem = Path(person_id).stem
        agnostic = _load_image(base / "agnostic" / f"{stem}.png", resolution)
        pose = _pose_heatmaps(base / "pose" / f"{stem}.json", resolution)
        return TryOnSample(cloth_image=cloth, person_image=person, pose_map=pose,
                           agnostic_image=agnostic, ground_truth=person)

    # eagerly validate that every referenced person/cloth image exists
    for person_id, cloth_id in pairs:
        for p in (base / "image" / person_id, base / "cloth" / cloth_id):
            if not p.exists():
                raise LoadError(f"pair list references missing file {p}")

    return DatasetSplit(root=root, pairs=pairs, split=split,
                        resolution=resolution, loader=loader)
