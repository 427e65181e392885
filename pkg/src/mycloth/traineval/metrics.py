"""Image quality metrics: SSIM, PSNR, FID, and Inception Score.

All metrics take [0, 1]-normalized images. SSIM operates on luminance; FID
and IS take pluggable feature extractors / classifiers so the offline suite
never needs pretrained weights.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.signal

from ..errors import ShapeError, ValidationError

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
FID_EPS = 1e-6


@dataclass(frozen=True)
class MetricsReport:
    ssim: float
    psnr: float  # dB; math.inf when the inputs are identical
    fid: float
    inception_score: float
    n_samples: int
    checkpoint_id: str

    def __post_init__(self):
        if not -1 <= self.ssim <= 1:
            raise ValidationError(f"ssim {self.ssim} outside [-1, 1]")
        if self.psnr < 0:
            raise ValidationError("psnr must be non-negative")
        if self.fid < 0:
            raise ValidationError("fid must be non-negative")
        if self.inception_score < 1 - 1e-9:
            raise ValidationError("inception score must be >= 1")

    def to_json(self) -> str:
        data = asdict(self)
        if math.isinf(self.psnr):
            data["psnr"] = "inf"
        return json.dumps(data, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        data = json.loads(text)
        if data["psnr"] == "inf":
            data["psnr"] = math.inf
        return cls(**data)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())


def _as_float_image(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if hasattr(a, "detach"):
        arr = a.detach().cpu().numpy().astype(np.float64)
    return arr


def to_luminance(img: np.ndarray) -> np.ndarray:
    if img.ndim == 2:
        return img
    if img.ndim == 3 and img.shape[0] in (1, 3):  # channel-first tensor layout
        img = np.moveaxis(img, 0, -1)
    if img.ndim == 3 and img.shape[2] == 3:
        return 0.299 * img[:, :, 0] + 0.587 * img[:, :, 1] + 0.114 * img[:, :, 2]
    if img.ndim == 3 and img.shape[2] == 1:
        return img[:, :, 0]
    raise ShapeError(f"cannot interpret image of shape {img.shape}")


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    ax = np.arange(size) - (size - 1) / 2
    g = np.exp(-(ax ** 2) / (2 * sigma ** 2))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def ssim(a, b) -> float:
    """Windowed SSIM on luminance, dynamic range 1.0, valid windows only."""
    xa, xb = _as_float_image(a), _as_float_image(b)
    if xa.shape != xb.shape:
        raise ShapeError(f"shape mismatch {xa.shape} vs {xb.shape}")
    la, lb = to_luminance(xa), to_luminance(xb)
    kernel = gaussian_window()
    corr = lambda img: scipy.signal.correlate2d(img, kernel, mode="valid")
    mu_a, mu_b = corr(la), corr(lb)
    var_a = corr(la * la) - mu_a ** 2
    var_b = corr(lb * lb) - mu_b ** 2
    cov = corr(la * lb) - mu_a * mu_b
    c1 = SSIM_K1 ** 2
    c2 = SSIM_K2 ** 2
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)
    return float((num / den).mean())


def psnr(a, b) -> float:
    """10 * log10(1 / MSE) on [0, 1] images; inf for identical inputs."""
    xa, xb = _as_float_image(a), _as_float_image(b)
    if xa.shape != xb.shape:
        raise ShapeError(f"shape mismatch {xa.shape} vs {xb.shape}")
    mse = float(((xa - xb) ** 2).mean())
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def fid(features_a: np.ndarray, features_b: np.ndarray, eps: float = FID_EPS) -> float:
    """Frechet distance between Gaussians fitted to two feature sets."""
    fa = np.asarray(features_a, dtype=np.float64)
    fb = np.asarray(features_b, dtype=np.float64)
    if fa.ndim != 2 or fb.ndim != 2 or fa.shape[0] < 2 or fb.shape[0] < 2:
        raise ValidationError("each feature set needs >= 2 samples of shape (n, d)")
    mu_a, mu_b = fa.mean(axis=0), fb.mean(axis=0)
    cov_a = np.cov(fa, rowvar=False) + eps * np.eye(fa.shape[1])
    cov_b = np.cov(fb, rowvar=False) + eps * np.eye(fb.shape[1])
    sqrt_ab, _ = scipy.linalg.sqrtm(cov_a @ cov_b, disp=False)
    if np.iscomplexobj(sqrt_ab):
        if np.abs(sqrt_ab.imag).max() > 1e-5:
            raise ValidationError(
                "matrix square root has a large imaginary part; increase the "
                "regularization eps or supply more samples")
        sqrt_ab = sqrt_ab.real
    diff = mu_a - mu_b
    value = diff @ diff + np.trace(cov_a + cov_b - 2 * sqrt_ab)
    return float(max(value, 0.0))


def inception_score(probabilities: np.ndarray) -> float:
    """exp(mean KL(p(y|x) || p(y))), single split."""
    p = np.asarray(probabilities, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] == 0:
        raise ValidationError("need a non-empty (n, k) array of class distributions")
    marginal = p.mean(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        kl = np.where(p > 0, p * (np.log(p) - np.log(marginal)), 0.0)
    return float(np.exp(kl.sum(axis=1).mean()))


# -- pluggable test doubles --------------------------------------------------

class RandomProjectionExtractor:
    """Fixed random linear embedding of flattened images; FID test double."""

    def __init__(self, seed: int = 0, dim: int = 16):
        self.seed = seed
        self.dim = dim
        self._matrix: np.ndarray | None = None

    def __call__(self, images: list) -> np.ndarray:
        flat = np.stack([_as_float_image(img).reshape(-1) for img in images])
        if self._matrix is None or self._matrix.shape[0] != flat.shape[1]:
            rng = np.random.default_rng(self.seed)
            self._matrix = rng.standard_normal((flat.shape[1], self.dim)) / np.sqrt(flat.shape[1])
        return flat @ self._matrix


class RandomProjectionClassifier:
    """Fixed random logit head; Inception-Score test double."""

    def __init__(self, seed: int = 0, classes: int = 10):
        self.extractor = RandomProjectionExtractor(seed, classes)

    def __call__(self, images: list) -> np.ndarray:
        logits = self.extractor(images) * 4.0
        z = logits - logits.max(axis=1, keepdims=True)
        e = np.exp(z)
        return e / e.sum(axis=1, keepdims=True)


class UniformClassifier:
    def __init__(self, classes: int = 10):
        self.classes = classes

    def __call__(self, images: list) -> np.ndarray:
        return np.full((len(images), self.classes), 1.0 / self.classes)
