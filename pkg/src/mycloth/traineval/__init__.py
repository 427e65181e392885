from .ablation import ABLATION_MATRIX, AblationRow, parameter_count, run_ablation
from .data import DatasetSplit, TryOnSample, load_viton, make_toy_dataset
from .evaluate import evaluate, model_inference, to_unit_image
from .metrics import (
    MetricsReport,
    RandomProjectionClassifier,
    RandomProjectionExtractor,
    UniformClassifier,
    fid,
    inception_score,
    psnr,
    ssim,
)
from .train import (
    AblationFlags,
    TrainConfig,
    apply_ablation,
    compute_losses,
    load_checkpoint,
    lr_at_epoch,
    save_checkpoint,
    seed_everything,
    train,
)

__all__ = [
    "ABLATION_MATRIX",
    "AblationFlags",
    "AblationRow",
    "DatasetSplit",
    "MetricsReport",
    "RandomProjectionClassifier",
    "RandomProjectionExtractor",
    "TrainConfig",
    "TryOnSample",
    "UniformClassifier",
    "apply_ablation",
    "compute_losses",
    "evaluate",
    "fid",
    "inception_score",
    "load_checkpoint",
    "load_viton",
    "lr_at_epoch",
    "make_toy_dataset",
    "model_inference",
    "parameter_count",
    "psnr",
    "run_ablation",
    "save_checkpoint",
    "seed_everything",
    "ssim",
    "to_unit_image",
    "train",
]
