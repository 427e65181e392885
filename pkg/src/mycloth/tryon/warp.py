"""Differentiable bilinear warping by a per-pixel displacement field.

Implemented with explicit gathers rather than grid_sample so that zero flow
reproduces the source bit-exactly and the same code runs in float64 for
finite-difference checks.
"""
from __future__ import annotations

import torch

from ..errors import ShapeError


def warp(source: torch.Tensor, flow: torch.Tensor) -> torch.Tensor:
    """Sample ``source`` at (x + dx, y + dy) with bilinear weights.

    source: (C, H, W) or (B, C, H, W); flow: matching (2, H, W) or (B, 2, H, W)
    carrying (dx, dy) in pixels. Out-of-bounds samples clamp to the border.
    """
    squeeze = source.dim() == 3
    if squeeze:
        source = source.unsqueeze(0)
        flow = flow.unsqueeze(0)
    if source.dim() != 4 or flow.dim() != 4 or flow.shape[1] != 2:
        raise ShapeError(f"bad warp shapes {tuple(source.shape)} / {tuple(flow.shape)}")
    if source.shape[-2:] != flow.shape[-2:] or source.shape[0] != flow.shape[0]:
        raise ShapeError(f"source {tuple(source.shape)} and flow {tuple(flow.shape)} disagree")

    b, c, h, w = source.shape
    dtype = source.dtype
    ys, xs = torch.meshgrid(
        torch.arange(h, device=source.device, dtype=dtype),
        torch.arange(w, device=source.device, dtype=dtype),
        indexing="ij",
    )
    pos_x = (xs.unsqueeze(0) + flow[:, 0]).clamp(0, w - 1)
    pos_y = (ys.unsqueeze(0) + flow[:, 1]).clamp(0, h - 1)

    x0 = pos_x.floor().long().clamp(0, w - 1)
    y0 = pos_y.floor().long().clamp(0, h - 1)
    x1 = (x0 + 1).clamp(max=w - 1)
    y1 = (y0 + 1).clamp(max=h - 1)
    wx = (pos_x - x0.to(dtype)).unsqueeze(1)
    wy = (pos_y - y0.to(dtype)).unsqueeze(1)

    flat = source.reshape(b, c, h * w)

    def gather(yy, xx):
        idx = (yy * w + xx).reshape(b, 1, h * w).expand(b, c, h * w)
        return flat.gather(2, idx).reshape(b, c, h, w)

    out = (
        gather(y0, x0) * (1 - wy) * (1 - wx)
        + gather(y0, x1) * (1 - wy) * wx
        + gather(y1, x0) * wy * (1 - wx)
        + gather(y1, x1) * wy * wx
    )
    return out.squeeze(0) if squeeze else out


def upsample_flow(flow: torch.Tensor, scale: int = 2) -> torch.Tensor:
    """Upsample a flow field spatially and rescale the displacements to the
    finer pixel grid."""
    squeeze = flow.dim() == 3
    if squeeze:
        flow = flow.unsqueeze(0)
    up = torch.nn.functional.interpolate(
        flow, scale_factor=scale, mode="bilinear", align_corners=False
    ) * scale
    return up.squeeze(0) if squeeze else up
