"""The single-stage try-on network: dual feature pyramids, a coarse-to-fine
warping cascade, and a shallow shared-encoder generator."""
from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn

from ..errors import ContractError, ShapeError
from .blocks import FeaturePyramid, WarpStage, conv_block, zero_conv
from .config import ModelConfig
from .warp import upsample_flow, warp


@dataclass
class TryOnOutputs:
    """y_p plus the per-scale cascade products, ordered coarsest to finest."""
    y_p: torch.Tensor
    warped_cloth_per_scale: list[torch.Tensor]
    fused_flow_per_scale: list[torch.Tensor]


class ClothGenerator(nn.Module):
    """Shallow encoder (shared between cloth and agnostic), a full-resolution
    warp stage on the latents, and a shallow decoder. No spatial resampling."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        k = config.kernel_size
        widths = config.gen_hidden_dims
        enc = []
        prev = 3
        for width in widths:
            enc.append(conv_block(prev, width, k))
            prev = width
        self.encoder = nn.Sequential(*enc)
        self.fuse_stage = WarpStage(prev, config, use_frw=config.use_frw_gen)
        dec = []
        prev = 2 * widths[-1]
        for width in reversed(widths):
            dec.append(conv_block(prev, width, k))
            prev = width
        self.decoder = nn.Sequential(*dec)
        self.project = zero_conv(prev, 3, k)

    def forward(self, x_c: torch.Tensor, agnostic: torch.Tensor,
                finest_flow: torch.Tensor) -> torch.Tensor:
        if finest_flow is None:
            raise ContractError("generator needs the finest-scale flow")
        cloth_latent = self.encoder(x_c)
        agnostic_latent = self.encoder(agnostic)
        prior = upsample_flow(finest_flow, scale=x_c.shape[-1] // finest_flow.shape[-1])
        _, warped_latent = self.fuse_stage(cloth_latent, agnostic_latent, prior)
        features = torch.cat([agnostic_latent, warped_latent], dim=1)
        return torch.tanh(self.project(self.decoder(features)))


class TryOnModel(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.cloth_pyramid = FeaturePyramid(3, config)
        self.human_pyramid = FeaturePyramid(config.pose_channels + 3, config)
        self.stages = nn.ModuleList(
            WarpStage(config.pyramid_channels, config) for _ in range(config.num_scales)
        )
        self.generator = ClothGenerator(config)

    def extract_features(self, x: torch.Tensor, branch: str) -> list[torch.Tensor]:
        pyramid = {"cloth": self.cloth_pyramid, "human": self.human_pyramid}[branch]
        return pyramid(x)

    def cascade(self, cloth_feats: list[torch.Tensor], human_feats: list[torch.Tensor]):
        """Coarse-to-fine flow estimation. Returns (flows, warped features),
        both coarsest first."""
        flows: list[torch.Tensor] = []
        warped: list[torch.Tensor] = []
        prior = None
        for level in range(self.config.num_scales - 1, -1, -1):
            stage = self.stages[level]
            if prior is not None:
                prior = upsample_flow(prior)
            flow, warped_feat = stage(cloth_feats[level], human_feats[level], prior)
            flows.append(flow)
            warped.append(warped_feat)
            prior = flow
        return flows, warped

    def forward(self, x_c: torch.Tensor, pose_map: torch.Tensor,
                agnostic: torch.Tensor) -> TryOnOutputs:
        squeeze = x_c.dim() == 3
        if squeeze:
            x_c, pose_map, agnostic = (t.unsqueeze(0) for t in (x_c, pose_map, agnostic))
        if x_c.shape[-2:] != pose_map.shape[-2:] or x_c.shape[-2:] != agnostic.shape[-2:]:
            raise ShapeError("inputs must share spatial dims")
        cloth_feats = self.extract_features(x_c, "cloth")
        human_feats = self.extract_features(torch.cat([pose_map, agnostic], dim=1), "human")
        flows, warped = self.cascade(cloth_feats, human_feats)
        y_p = self.generator(x_c, agnostic, flows[-1])
        if squeeze:
            y_p = y_p.squeeze(0)
            flows = [f.squeeze(0) for f in flows]
            warped = [t.squeeze(0) for t in warped]
        return TryOnOutputs(y_p=y_p, warped_cloth_per_scale=warped,
                            fused_flow_per_scale=flows)

    def warped_cloth_images(self, x_c: torch.Tensor,
                            flows: list[torch.Tensor]) -> list[torch.Tensor]:
        """Downsampled cloth image warped by each scale's fused flow,
        coarsest first. These are the coarse supervision targets' mates."""
        outs = []
        for flow in flows:
            size = flow.shape[-2:]
            small = nn.functional.interpolate(
                x_c if x_c.dim() == 4 else x_c.unsqueeze(0),
                size=size, mode="area")
            if x_c.dim() == 3:
                small = small.squeeze(0)
            outs.append(warp(small, flow))
        return outs
