"""Training loop: Adam, stepped learning-rate schedule, per-epoch checkpoints."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import torch

from ..errors import TrainingDiverged, ValidationError
from ..tryon.config import ModelConfig
from ..tryon.losses import (
    RandomConvExtractor,
    downsample_to,
    loss_perceptual,
    loss_similarity,
)
from ..tryon.model import TryOnModel
from .data import DatasetSplit


@dataclass(frozen=True)
class AblationFlags:
    afew: bool = True
    frw_warp: bool = True
    frw_gen: bool = True


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 16
    epochs: int = 200
    initial_lr: float = 5e-5
    lr_decay_factor: float = 0.1
    lr_decay_every_epochs: int = 50
    beta1: float = 0.9
    beta2: float = 0.999
    seed: int = 0
    max_steps: Optional[int] = None  # cap for smoke tests; None = full epochs
    checkpoint_every_epochs: int = 1
    ablation_flags: AblationFlags = field(default_factory=AblationFlags)

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValidationError("batch size must be >= 1")
        if not self.initial_lr > 0:
            raise ValidationError("learning rate must be positive")
        if not 0 < self.lr_decay_factor <= 1:
            raise ValidationError("decay factor must be in (0, 1]")


def lr_at_epoch(config: TrainConfig, epoch: int) -> float:
    return config.initial_lr * config.lr_decay_factor ** (epoch // config.lr_decay_every_epochs)


def apply_ablation(model_config: ModelConfig, flags: AblationFlags) -> ModelConfig:
    from dataclasses import replace

    return replace(model_config, use_afew=flags.afew,
                   use_frw_warp=flags.frw_warp, use_frw_gen=flags.frw_gen)


def seed_everything(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed % 2 ** 32)
    torch.manual_seed(seed)


def _batch(dataset: DatasetSplit, indices: list[int]):
    samples = [dataset.get(i) for i in indices]
    stack = lambda attr: torch.stack([getattr(s, attr) for s in samples])
    return (stack("cloth_image"), stack("pose_map"), stack("agnostic_image"),
            stack("person_image"), stack("ground_truth"),
            torch.stack([s.garment_mask() for s in samples]))


def compute_losses(model: TryOnModel, x_c, pose, agnostic, y_g, mask, extractor):
    """Scale-weighted loss: coarse scales supervise the warped cloth image
    against the masked ground-truth garment, the finest scale supervises y_p.

    Returns (total, similarity_sum, perceptual_sum) with the (n + 1) weights
    applied to the total only.
    """
    config = model.config
    outputs = model(x_c, pose, agnostic)
    flows = outputs.fused_flow_per_scale  # coarsest first
    warped_images = model.warped_cloth_images(x_c, flows)

    preds, targets = [], []
    masked_gt = y_g * mask
    for level, warped in enumerate(warped_images[:-1]):
        size = warped.shape[-2:]
        small_mask = downsample_to(mask, size)
        preds.append(warped * small_mask)
        targets.append(downsample_to(masked_gt, size))
    preds.append(outputs.y_p)
    targets.append(y_g)

    total = x_c.new_zeros(())
    sim_sum = x_c.new_zeros(())
    per_sum = x_c.new_zeros(())
    for n, (pred, target) in enumerate(zip(preds, targets), start=1):
        sim = loss_similarity(pred, target)
        per = loss_perceptual(pred, target, extractor)
        total = total + (n + 1) * (config.lambda_s * sim + config.lambda_per * per)
        sim_sum = sim_sum + sim
        per_sum = per_sum + per
    return total, sim_sum, per_sum, outputs


def save_checkpoint(out_dir: Path, model: TryOnModel, optimizer, config: TrainConfig,
                    epoch: int, step: int) -> Path:
    ckpt = out_dir / f"epoch_{epoch:04d}"
    ckpt.mkdir(parents=True, exist_ok=True)
    torch.save({"model": model.state_dict(), "optimizer": optimizer.state_dict()},
               ckpt / "weights")
    model.config.save(ckpt / "model_config.json")
    (ckpt / "train_state.json").write_text(json.dumps({
        "epoch": epoch,
        "step": step,
        "seed": config.seed,
        "lr": lr_at_epoch(config, epoch),
        "optimizer_moments": "weights",
    }, indent=2))
    return ckpt


def load_checkpoint(ckpt_dir: str | Path) -> tuple[TryOnModel, dict]:
    ckpt_dir = Path(ckpt_dir)
    config = ModelConfig.load(ckpt_dir / "model_config.json")
    model = TryOnModel(config)
    blob = torch.load(ckpt_dir / "weights", map_location="cpu", weights_only=True)
    model.load_state_dict(blob["model"])
    state = json.loads((ckpt_dir / "train_state.json").read_text())
    return model, state


def train(model_config: ModelConfig, train_config: TrainConfig, dataset: DatasetSplit,
          out_dir: str | Path, extractor=None, model: Optional[TryOnModel] = None):
    """Run the training loop; returns (model, history of per-step records)."""
    if len(dataset) == 0:
        raise ValidationError("dataset is empty")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed_everything(train_config.seed)

    model_config = apply_ablation(model_config, train_config.ablation_flags)
    if model is None:
        model = TryOnModel(model_config)
    if extractor is None:
        extractor = RandomConvExtractor(seed=train_config.seed)

    optimizer = torch.optim.Adam(model.parameters(), lr=train_config.initial_lr,
                                 betas=(train_config.beta1, train_config.beta2))
    order_rng = np.random.default_rng(train_config.seed)
    history = []
    step = 0
    metrics_path = out_dir / "metrics.jsonl"
    # with max_steps set, epochs repeat until the step budget is spent
    total_epochs = (train_config.epochs if train_config.max_steps is None
                    else max(train_config.epochs,
                             -(-train_config.max_steps * train_config.batch_size
                               // max(1, len(dataset)))))
    with metrics_path.open("w") as metrics_file:
        for epoch in range(total_epochs):
            lr = lr_at_epoch(train_config, epoch)
            for group in optimizer.param_groups:
                group["lr"] = lr
            order = order_rng.permutation(len(dataset))
            for start in range(0, len(dataset), train_config.batch_size):
                indices = order[start:start + train_config.batch_size].tolist()
                x_c, pose, agnostic, _, y_g, mask = _batch(dataset, indices)
                total, sim, per, _ = compute_losses(model, x_c, pose, agnostic,
                                                    y_g, mask, extractor)
                if not torch.isfinite(total):
                    dump = out_dir / f"diverged_step_{step}.pt"
                    torch.save({"x_c": x_c, "pose": pose, "agnostic": agnostic,
                                "y_g": y_g, "step": step}, dump)
                    raise TrainingDiverged(f"non-finite loss at step {step}; batch dumped to {dump}")
                optimizer.zero_grad()
                total.backward()
                optimizer.step()
                record = {"step": step, "epoch": epoch, "lr": lr,
                          "loss": total.item(), "loss_similarity": sim.item(),
                          "loss_perceptual": per.item()}
                metrics_file.write(json.dumps(record) + "\n")
                history.append(record)
                step += 1
                if train_config.max_steps is not None and step >= train_config.max_steps:
                    save_checkpoint(out_dir, model, optimizer, train_config, epoch, step)
                    return model, history
            if (epoch + 1) % train_config.checkpoint_every_epochs == 0:
                save_checkpoint(out_dir, model, optimizer, train_config, epoch, step)
    return model, history
