"""Building blocks: feature pyramid encoders, flow estimation, and the
attention-based rectification modules."""
from __future__ import annotations

import torch
import torch.nn as nn

from ..errors import ShapeError
from .config import ModelConfig
from .warp import warp


def conv_block(in_ch: int, out_ch: int, kernel: int, stride: int = 1) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_ch, out_ch, kernel, stride=stride, padding=kernel // 2),
        nn.LeakyReLU(0.1, inplace=True),
    )


def zero_conv(in_ch: int, out_ch: int, kernel: int) -> nn.Conv2d:
    conv = nn.Conv2d(in_ch, out_ch, kernel, padding=kernel // 2)
    nn.init.zeros_(conv.weight)
    nn.init.zeros_(conv.bias)
    return conv


class FeaturePyramid(nn.Module):
    """Stride-2 encoder with a top-down path projecting every level to a
    common channel width. Level i (1-based) lives at (H / 2^i, W / 2^i)."""

    def __init__(self, in_channels: int, config: ModelConfig):
        super().__init__()
        k = config.kernel_size
        widths = config.encoder_channels
        downs = []
        prev = in_channels
        for width in widths:
            downs.append(nn.Sequential(conv_block(prev, width, k, stride=2),
                                       conv_block(width, width, k)))
            prev = width
        self.downs = nn.ModuleList(downs)
        self.laterals = nn.ModuleList(
            nn.Conv2d(width, config.pyramid_channels, 1) for width in widths
        )
        self.smooth = nn.ModuleList(
            conv_block(config.pyramid_channels, config.pyramid_channels, k)
            for _ in widths
        )

    def forward(self, x: torch.Tensor) -> list[torch.Tensor]:
        """Returns levels ordered fine-to-coarse: index 0 is H/2."""
        h, w = x.shape[-2:]
        stride = 2 ** len(self.downs)
        if h % stride or w % stride:
            raise ShapeError(f"input {h}x{w} not divisible by {stride}")
        feats = []
        cur = x
        for down in self.downs:
            cur = down(cur)
            feats.append(cur)
        out = [None] * len(feats)
        top = self.laterals[-1](feats[-1])
        out[-1] = self.smooth[-1](top)
        for i in range(len(feats) - 2, -1, -1):
            up = nn.functional.interpolate(top, scale_factor=2, mode="nearest")
            top = self.laterals[i](feats[i]) + up
            out[i] = self.smooth[i](top)
        return out


class AppearanceFlowEstimator(nn.Module):
    """Four hidden conv layers followed by a zero-initialized 2-channel
    projection, so a freshly built estimator predicts the identity warp."""

    def __init__(self, in_channels: int, config: ModelConfig):
        super().__init__()
        k = config.kernel_size
        layers = []
        prev = in_channels
        for width in config.afe_hidden_dims:
            layers.append(conv_block(prev, width, k))
            prev = width
        self.hidden = nn.Sequential(*layers)
        self.project = zero_conv(prev, 2, k)

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        return self.project(self.hidden(features))


class SpatialAttention(nn.Module):
    def __init__(self, kernel: int):
        super().__init__()
        self.conv = nn.Conv2d(2, 1, kernel, padding=kernel // 2)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        pooled = torch.cat([x.mean(dim=1, keepdim=True),
                            x.amax(dim=1, keepdim=True)], dim=1)
        return torch.sigmoid(self.conv(pooled))


class ChannelAttention(nn.Module):
    """Squeeze-excitation with reduction 4."""

    def __init__(self, channels: int, reduction: int = 4):
        super().__init__()
        hidden = max(1, channels // reduction)
        self.fc = nn.Sequential(
            nn.Linear(channels, hidden),
            nn.ReLU(inplace=True),
            nn.Linear(hidden, channels),
            nn.Sigmoid(),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        gate = self.fc(x.mean(dim=(2, 3)))
        return gate[:, :, None, None]


class FlawRectification(nn.Module):
    """Residual flow correction: spatial attention over the (feature, flow)
    stack, one fusion conv, channel attention, then a zero-initialized delta."""

    def __init__(self, feature_channels: int, config: ModelConfig):
        super().__init__()
        k = config.kernel_size
        in_ch = feature_channels + 2
        self.spatial = SpatialAttention(k)
        self.fuse = conv_block(in_ch, feature_channels, k)
        self.channel = ChannelAttention(feature_channels)
        self.delta = zero_conv(feature_channels, 2, k)

    def forward(self, feature: torch.Tensor, flow: torch.Tensor) -> torch.Tensor:
        if feature.shape[-2:] != flow.shape[-2:]:
            raise ShapeError("feature and flow spatial dims differ")
        x = torch.cat([feature, flow], dim=1)
        x = x * self.spatial(x)
        x = self.fuse(x)
        x = x * self.channel(x)
        return flow + self.delta(x)


class WarpStage(nn.Module):
    """One pyramid scale of the warping cascade.

    Full form: per-branch flow estimation, rectification of both flows, and a
    fused flow estimated from the warped cloth / human stack. Ablated forms
    drop the attention path (single joint estimator) and/or rectification.
    """

    def __init__(self, in_channels: int, config: ModelConfig, use_frw: bool | None = None):
        super().__init__()
        self.use_afew = config.use_afew
        self.use_frw = config.use_frw_warp if use_frw is None else use_frw
        if self.use_afew:
            self.afe_cloth = AppearanceFlowEstimator(in_channels, config)
            self.afe_human = AppearanceFlowEstimator(in_channels, config)
            self.afe_fused = AppearanceFlowEstimator(2 * in_channels + 4, config)
            if self.use_frw:
                self.frw_cloth = FlawRectification(in_channels, config)
                self.frw_human = FlawRectification(in_channels, config)
        else:
            self.afe_joint = AppearanceFlowEstimator(2 * in_channels, config)
            if self.use_frw:
                self.frw_cloth = FlawRectification(in_channels, config)

    def forward(self, f_c: torch.Tensor, f_h: torch.Tensor,
                prior_flow: torch.Tensor | None = None):
        if f_c.shape != f_h.shape:
            raise ShapeError("cloth and human features must share a shape")

        def compose(flow):
            return flow if prior_flow is None else flow + prior_flow

        if not self.use_afew:
            flow = compose(self.afe_joint(torch.cat([f_c, f_h], dim=1)))
            if self.use_frw:
                flow = self.frw_cloth(warp(f_c, flow), flow)
            return flow, warp(f_c, flow)

        flow_c = compose(self.afe_cloth(f_c))
        flow_h = compose(self.afe_human(f_h))
        warped_c = warp(f_c, flow_c)
        if self.use_frw:
            flow_c = self.frw_cloth(warped_c, flow_c)
            flow_h = self.frw_human(f_h, flow_h)
            warped_c = warp(f_c, flow_c)
        stack = torch.cat([warped_c, f_h, flow_c, flow_h], dim=1)
        fused = compose(self.afe_fused(stack))
        return fused, warp(f_c, fused)
