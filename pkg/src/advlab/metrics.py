"""Impact metrics: accuracies over the attacked subset, windowed SSIM
statistics, the grade score, and per-sample difference images.

SSIM uses a uniform 8x8 window (all valid positions, stride 1), biased (1/N)
window statistics, constants C1=(0.01*L)^2 and C2=(0.03*L)^2 with dynamic
range L=1. Images smaller than the window fall back to a single global
window. Channels are averaged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .net import F32, forward


@dataclass(frozen=True)
class SsimParams:
    window: int = 8
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0

    @property
    def c1(self):
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self):
        return (self.k2 * self.dynamic_range) ** 2


@dataclass(frozen=True)
class ImpactSample:
    """One attacked sample: image triplet plus labels and predictions."""

    index: int
    true_label: int
    original_prediction: int
    adversarial_prediction: int
    similarity: float
    original: np.ndarray
    adversarial: np.ndarray
    diff: np.ndarray


@dataclass(frozen=True)
class ImpactReport:
    original_accuracy: float
    adversarial_accuracy: float
    similarity_avg: float
    similarity_max: float
    similarity_min: float
    grade: float
    samples: tuple


def _channel_ssim(a, b, window, c1, c2):
    h, w = a.shape
    wh = window if h >= window else h
    ww = window if w >= window else w
    wa = sliding_window_view(a, (wh, ww))
    wb = sliding_window_view(b, (wh, ww))
    mu_a = wa.mean(axis=(-1, -2))
    mu_b = wb.mean(axis=(-1, -2))
    da = wa - mu_a[..., None, None]
    db = wb - mu_b[..., None, None]
    var_a = (da ** 2).mean(axis=(-1, -2))
    var_b = (db ** 2).mean(axis=(-1, -2))
    cov = (da * db).mean(axis=(-1, -2))
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)
    return (num / den).mean()


def ssim(a, b, params=SsimParams()):
    """Mean of local SSIM over all valid window positions, channels averaged.
    Symmetric in (a, b); 1 for identical images."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    if a.ndim == 2:
        a, b = a[None], b[None]
    if a.ndim != 3:
        raise ValueError(f"expected (c, h, w) or (h, w) images, got shape {a.shape}")
    values = [
        _channel_ssim(a[ch], b[ch], params.window, params.c1, params.c2)
        for ch in range(a.shape[0])
    ]
    return float(np.mean(values))


def diff_image(a, b):
    """Per-pixel |a - b| rescaled so the maximum maps to 1; an all-zero
    difference stays all-zero."""
    a = np.asarray(a, dtype=F32)
    b = np.asarray(b, dtype=F32)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    d = np.abs(a.astype(np.float64) - b.astype(np.float64))
    peak = d.max()
    if peak > 0:
        d = d / peak
    return d.astype(F32)


def grade(misclassification_rate, similarity_avg):
    """Balance of evasion success against perceptual similarity:
    rate * clamp(similarity, 0, 1). A tamper that flips nothing scores 0."""
    if not 0.0 <= misclassification_rate <= 1.0:
        raise ValueError(f"misclassification rate must be in [0, 1], got {misclassification_rate}")
    return float(misclassification_rate * min(max(similarity_avg, 0.0), 1.0))


def as_predictor(model):
    """Normalize a Network or a batch->probabilities callable to a callable."""
    if callable(model):
        return model
    return lambda xb: forward(model, xb)


def build_impact_report(model, trajectories, labels, params=SsimParams(), indices=None):
    """Assemble the six impact metrics plus per-sample triplets.

    `model` is the Network (or predictor) used to classify both the original
    and adversarial states; accuracies are measured over exactly the attacked
    subset. Misclassification is counted against the original prediction, not
    the true label, so the grade rewards flipping the model.
    """
    if len(trajectories) == 0:
        raise ValueError("no trajectories to report on")
    if len(labels) != len(trajectories):
        raise ValueError(f"{len(labels)} labels for {len(trajectories)} trajectories")
    if indices is None:
        indices = list(range(len(trajectories)))
    predict = as_predictor(model)

    originals = np.stack([t.original for t in trajectories])
    adversarials = np.stack([t.adversarial for t in trajectories])
    labels = np.asarray(labels, dtype=np.int64)
    preds_orig = predict(originals).argmax(axis=1)
    preds_adv = predict(adversarials).argmax(axis=1)

    sims = np.array([ssim(o, a, params) for o, a in zip(originals, adversarials)])
    flip_rate = float((preds_adv != preds_orig).mean())
    samples = tuple(
        ImpactSample(
            index=int(indices[i]),
            true_label=int(labels[i]),
            original_prediction=int(preds_orig[i]),
            adversarial_prediction=int(preds_adv[i]),
            similarity=float(sims[i]),
            original=originals[i],
            adversarial=adversarials[i],
            diff=diff_image(originals[i], adversarials[i]),
        )
        for i in range(len(trajectories))
    )
    return ImpactReport(
        original_accuracy=float((preds_orig == labels).mean()),
        adversarial_accuracy=float((preds_adv == labels).mean()),
        similarity_avg=float(sims.mean()),
        similarity_max=float(sims.max()),
        similarity_min=float(sims.min()),
        grade=grade(flip_rate, float(sims.mean())),
        samples=samples,
    )
