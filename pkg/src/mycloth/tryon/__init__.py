from .blocks import (
    AppearanceFlowEstimator,
    ChannelAttention,
    FeaturePyramid,
    FlawRectification,
    SpatialAttention,
    WarpStage,
)
from .config import TINY_CONFIG, ModelConfig
from .losses import (
    IdentityExtractor,
    RandomConvExtractor,
    downsample_to,
    loss_perceptual,
    loss_similarity,
    loss_total,
)
from .model import ClothGenerator, TryOnModel, TryOnOutputs
from .warp import upsample_flow, warp

__all__ = [
    "AppearanceFlowEstimator",
    "ChannelAttention",
    "ClothGenerator",
    "FeaturePyramid",
    "FlawRectification",
    "IdentityExtractor",
    "ModelConfig",
    "RandomConvExtractor",
    "SpatialAttention",
    "TINY_CONFIG",
    "TryOnModel",
    "TryOnOutputs",
    "WarpStage",
    "downsample_to",
    "loss_perceptual",
    "loss_similarity",
    "loss_total",
    "upsample_flow",
    "warp",
]
