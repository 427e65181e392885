from .assets import AssetStore, PaintAsset, generate_paint, refine_prompt
from .clients import (
    GeneratorClientConfig,
    MockPromptRefiner,
    MockTextToImage,
    RemotePromptRefiner,
    RemoteTextToImage,
    make_clients,
)

__all__ = [
    "AssetStore",
    "GeneratorClientConfig",
    "MockPromptRefiner",
    "MockTextToImage",
    "PaintAsset",
    "RemotePromptRefiner",
    "RemoteTextToImage",
    "generate_paint",
    "make_clients",
    "refine_prompt",
]
