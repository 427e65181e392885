"""Model hyperparameters for the try-on network."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from ..errors import ValidationError


@dataclass(frozen=True)
class ModelConfig:
    num_scales: int = 5
    pose_channels: int = 3
    encoder_channels: tuple[int, ...] = (64, 96, 128, 128, 128)
    pyramid_channels: int = 128
    afe_hidden_dims: tuple[int, ...] = (512, 256, 128, 64)
    gen_hidden_dims: tuple[int, ...] = (32, 64, 128)
    kernel_size: int = 3
    lambda_s: float = 1.0
    lambda_per: float = 1.0
    use_afew: bool = True
    use_frw_warp: bool = True
    use_frw_gen: bool = True

    def __post_init__(self):
        if self.num_scales < 1:
            raise ValidationError("need at least one scale")
        if len(self.encoder_channels) != self.num_scales:
            raise ValidationError("encoder_channels must list one width per scale")
        if len(self.afe_hidden_dims) != 4:
            raise ValidationError("the flow estimator has exactly four hidden conv layers")
        if len(self.gen_hidden_dims) != 3:
            raise ValidationError("the generation encoder has exactly three conv layers")
        if not (self.lambda_s > 0 and self.lambda_per > 0):
            raise ValidationError("loss weights must be positive")
        if self.kernel_size % 2 != 1:
            raise ValidationError("kernel size must be odd")

    @property
    def stride(self) -> int:
        return 2 ** self.num_scales

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ModelConfig":
        data = json.loads(text)
        for key in ("encoder_channels", "afe_hidden_dims", "gen_hidden_dims"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | Path) -> "ModelConfig":
        return cls.from_json(Path(path).read_text())


TINY_CONFIG = ModelConfig(
    num_scales=2,
    pose_channels=3,
    encoder_channels=(8, 8),
    pyramid_channels=8,
    afe_hidden_dims=(4, 4, 4, 4),
    gen_hidden_dims=(4, 4, 4),
    kernel_size=1,
)
