"""Paired-setting evaluation of a checkpoint over a dataset split."""
from __future__ import annotations

from pathlib import Path
from typing import Callable, Optional

import numpy as np
import torch

from ..errors import ValidationError
from ..tryon.model import TryOnModel
from .data import DatasetSplit, TryOnSample
from .metrics import (
    MetricsReport,
    RandomProjectionClassifier,
    RandomProjectionExtractor,
    fid,
    inception_score,
    psnr,
    ssim,
)


def to_unit_image(t: torch.Tensor) -> np.ndarray:
    """(3, H, W) in [-1, 1] -> (H, W, 3) numpy in [0, 1]."""
    arr = t.detach().cpu().numpy()
    return np.clip((np.moveaxis(arr, 0, -1) + 1) / 2, 0.0, 1.0)


def model_inference(model: TryOnModel) -> Callable[[TryOnSample], torch.Tensor]:
    def infer(sample: TryOnSample) -> torch.Tensor:
        with torch.no_grad():
            return model(sample.cloth_image, sample.pose_map, sample.agnostic_image).y_p

    return infer


def evaluate(infer: Callable[[TryOnSample], torch.Tensor], dataset: DatasetSplit,
             feature_extractor=None, classifier=None, checkpoint_id: str = "",
             report_path: Optional[str | Path] = None) -> MetricsReport:
    if len(dataset) == 0:
        raise ValidationError("cannot evaluate on an empty split")
    if feature_extractor is None:
        feature_extractor = RandomProjectionExtractor()
    if classifier is None:
        classifier = RandomProjectionClassifier()

    ssim_values, psnr_values = [], []
    predicted, references = [], []
    for i in range(len(dataset)):
        sample = dataset.get(i)
        if sample.ground_truth is None:
            raise ValidationError("paired evaluation needs ground truth for every sample")
        pred = to_unit_image(infer(sample))
        ref = to_unit_image(sample.ground_truth)
        ssim_values.append(ssim(pred, ref))
        psnr_values.append(psnr(pred, ref))
        predicted.append(pred)
        references.append(ref)

    mean_psnr = float("inf") if any(np.isinf(psnr_values)) and all(
        np.isinf(psnr_values)) else float(np.mean([v for v in psnr_values if np.isfinite(v)] or [0.0]))
    report = MetricsReport(
        ssim=float(np.mean(ssim_values)),
        psnr=mean_psnr,
        fid=fid(feature_extractor(predicted), feature_extractor(references))
        if len(dataset) >= 2 else 0.0,
        inception_score=inception_score(classifier(predicted)),
        n_samples=len(dataset),
        checkpoint_id=checkpoint_id,
    )
    if report_path is not None:
        report.save(report_path)
    return report
