"""The fixed avatar gallery consumed by the try-on endpoint."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from ..errors import ConfigurationError, NotFoundError
from ..raster import Raster
from ..traineval.data import TryOnSample, make_toy_dataset


@dataclass(frozen=True)
class AvatarSpec:
    avatar_id: str
    person_path: Path
    pose_path: Path
    agnostic_path: Path

    def load_sample(self, cloth_image: torch.Tensor) -> TryOnSample:
        person = _png_to_unit(self.person_path)
        agnostic = _png_to_unit(self.agnostic_path)
        pose = torch.from_numpy(np.load(self.pose_path)).float()
        return TryOnSample(cloth_image=cloth_image, person_image=person,
                           pose_map=pose, agnostic_image=agnostic)


def _png_to_unit(path: Path) -> torch.Tensor:
    arr = Raster.load_png(path).to_array().astype(np.float32) / 255.0
    return torch.from_numpy(arr.transpose(2, 0, 1)) * 2 - 1


def _unit_to_png(t: torch.Tensor, path: Path) -> None:
    arr = ((t.numpy().transpose(1, 2, 0) + 1) / 2 * 255).round().clip(0, 255).astype(np.uint8)
    Raster.from_array(arr).save_png(path)


def write_seed_avatars(root: str | Path, count: int = 3, seed: int = 100) -> list[AvatarSpec]:
    """Generate a small procedural gallery (toy-person renderer)."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    ds = make_toy_dataset(count, seed=seed)
    entries = []
    for i in range(count):
        sample = ds.get(i)
        avatar_id = f"avatar-{i}"
        adir = root / avatar_id
        adir.mkdir(exist_ok=True)
        _unit_to_png(sample.person_image, adir / "person.png")
        _unit_to_png(sample.agnostic_image, adir / "agnostic.png")
        np.save(adir / "pose.npy", sample.pose_map.numpy())
        entries.append(avatar_id)
    (root / "manifest.json").write_text(json.dumps({"avatars": entries}, indent=2))
    return load_avatars(root)


def load_avatars(root: str | Path) -> list[AvatarSpec]:
    root = Path(root)
    manifest = root / "manifest.json"
    if not manifest.exists():
        raise ConfigurationError(f"avatar manifest {manifest} is missing")
    specs = []
    for avatar_id in json.loads(manifest.read_text())["avatars"]:
        adir = root / avatar_id
        spec = AvatarSpec(
            avatar_id=avatar_id,
            person_path=adir / "person.png",
            pose_path=adir / "pose.npy",
            agnostic_path=adir / "agnostic.png",
        )
        for p in (spec.person_path, spec.pose_path, spec.agnostic_path):
            if not p.exists():
                raise ConfigurationError(f"avatar {avatar_id} missing file {p}")
        specs.append(spec)
    return specs


def get_avatar(avatars: list[AvatarSpec], avatar_id: str) -> AvatarSpec:
    for spec in avatars:
        if spec.avatar_id == avatar_id:
            return spec
    raise NotFoundError(f"unknown avatar {avatar_id!r}")
