"""Training losses: L1 similarity, multi-tap perceptual, and the
scale-weighted total."""
from __future__ import annotations

import torch
import torch.nn as nn

from ..errors import ContractError, ShapeError
from .config import ModelConfig

NUM_TAPS = 5


def loss_similarity(y_p: torch.Tensor, y_g: torch.Tensor) -> torch.Tensor:
    if y_p.shape != y_g.shape:
        raise ShapeError(f"shape mismatch {tuple(y_p.shape)} vs {tuple(y_g.shape)}")
    return (y_p - y_g).abs().mean()


class IdentityExtractor:
    """Five taps that all return the input; for algebraic checks."""

    def __call__(self, x: torch.Tensor) -> list[torch.Tensor]:
        return [x] * NUM_TAPS


class RandomConvExtractor(nn.Module):
    """Seeded random-weight conv stack with five taps; the offline stand-in
    for a pretrained classification backbone."""

    def __init__(self, seed: int = 0, in_channels: int = 3, width: int = 16):
        super().__init__()
        gen = torch.Generator().manual_seed(seed)
        convs = []
        prev = in_channels
        for _ in range(NUM_TAPS):
            conv = nn.Conv2d(prev, width, 3, padding=1)
            with torch.no_grad():
                conv.weight.copy_(torch.randn(conv.weight.shape, generator=gen) * 0.2)
                conv.bias.zero_()
            convs.append(conv)
            prev = width
        self.convs = nn.ModuleList(convs)
        for p in self.parameters():
            p.requires_grad_(False)

    def __call__(self, x: torch.Tensor) -> list[torch.Tensor]:
        squeeze = x.dim() == 3
        if squeeze:
            x = x.unsqueeze(0)
        taps = []
        ref = next(self.parameters())
        if x.dtype != ref.dtype:
            self.to(x.dtype)
        for conv in self.convs:
            x = torch.relu(conv(x))
            taps.append(x.squeeze(0) if squeeze else x)
        return taps


class Vgg19Extractor(nn.Module):
    """Conv taps (relu1_2 ... relu5_2) of a pretrained 19-layer backbone.

    Requires torchvision weights; intended for production training, never for
    the offline test suite.
    """

    TAP_INDICES = (3, 8, 13, 22, 31)

    def __init__(self):
        super().__init__()
        from torchvision.models import VGG19_Weights, vgg19

        self.features = vgg19(weights=VGG19_Weights.IMAGENET1K_V1).features.eval()
        for p in self.parameters():
            p.requires_grad_(False)

    def __call__(self, x: torch.Tensor) -> list[torch.Tensor]:
        squeeze = x.dim() == 3
        if squeeze:
            x = x.unsqueeze(0)
        taps = []
        for i, layer in enumerate(self.features):
            x = layer(x)
            if i in self.TAP_INDICES:
                taps.append(x.squeeze(0) if squeeze else x)
            if i >= self.TAP_INDICES[-1]:
                break
        return taps


def loss_perceptual(y_p: torch.Tensor, y_g: torch.Tensor, extractor) -> torch.Tensor:
    taps_p = extractor(y_p)
    taps_g = extractor(y_g)
    if len(taps_p) != NUM_TAPS or len(taps_g) != NUM_TAPS:
        raise ContractError(f"extractor must expose {NUM_TAPS} taps, got {len(taps_p)}")
    total = y_p.new_zeros(())
    for tp, tg in zip(taps_p, taps_g):
        total = total + (tp - tg).abs().mean()
    return total


def loss_total(predictions: list[torch.Tensor], targets: list[torch.Tensor],
               config: ModelConfig, extractor) -> torch.Tensor:
    """Sum over scales of (n + 1) * (lambda_s * L1 + lambda_per * perceptual),
    with n = 1 the coarsest entry and n = N the finest."""
    n_scales = config.num_scales
    if len(predictions) != n_scales or len(targets) != n_scales:
        raise ContractError(
            f"expected {n_scales} per-scale predictions, got {len(predictions)}/{len(targets)}"
        )
    total = predictions[0].new_zeros(())
    for n, (pred, target) in enumerate(zip(predictions, targets), start=1):
        weight = n + 1
        term = (config.lambda_s * loss_similarity(pred, target)
                + config.lambda_per * loss_perceptual(pred, target, extractor))
        total = total + weight * term
    return total


def downsample_to(image: torch.Tensor, size: tuple[int, int]) -> torch.Tensor:
    """Area-average downsampling used to build coarse supervision targets."""
    squeeze = image.dim() == 3
    if squeeze:
        image = image.unsqueeze(0)
    out = torch.nn.functional.interpolate(image, size=size, mode="area")
    return out.squeeze(0) if squeeze else out
