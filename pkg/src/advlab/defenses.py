"""Defense mechanisms and their evaluation against a configured attack.

Three families:
  - adversarial training: retrain on batches whose leading mix_ratio
    fraction is replaced by examples crafted against the current weights
  - dimensionality reduction: a dense-relu-dense-sigmoid autoencoder used
    as a noise filter, either on the raw input or on the network's
    embedding; the base network's weights are never touched
  - prediction similarity: a FIFO history of query digests scoring how many
    recent queries are near-duplicates of the current one

Evaluation regenerates attacks against the hardened model for adversarial
training (white-box view of the changed gradient field) and replays the
baseline adversarial inputs through the filter/gate defenses.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .attacks import AttackConfig, craft, run_attack
from .metrics import ImpactReport, SsimParams, build_impact_report, ssim
from .net import (
    F32,
    Flatten,
    Network,
    Sigmoid,
    Relu,
    forward,
    init_dense,
    train_mse,
    train_sgd,
)

DEFENSE_KINDS = (
    "adversarial_training",
    "dim_reduction_input",
    "dim_reduction_embedding",
    "prediction_similarity",
)


@dataclass(frozen=True)
class AdversarialTrainingConfig:
    attack: AttackConfig
    mix_ratio: float = 0.5
    epochs: int = 30
    lr: float = 0.05
    batch_size: int = 32

    def __post_init__(self):
        if not 0.0 <= self.mix_ratio <= 1.0:
            raise ValueError(f"mix_ratio must be in [0, 1], got {self.mix_ratio}")


@dataclass(frozen=True)
class DimReductionConfig:
    latent_dim: int | None = None  # None: input_dim // 4
    epochs: int = 800
    lr: float = 30.0
    batch_size: int = 32


@dataclass(frozen=True)
class PredictionSimilarityConfig:
    window_capacity: int = 64
    similarity_threshold: float = 0.9
    risk_threshold: float = 0.5

    def __post_init__(self):
        if self.window_capacity < 1:
            raise ValueError("window_capacity must be >= 1")
        if not 0.0 < self.similarity_threshold <= 1.0:
            raise ValueError("similarity_threshold must be in (0, 1]")
        if not 0.0 < self.risk_threshold <= 1.0:
            raise ValueError("risk_threshold must be in (0, 1]")


@dataclass(frozen=True)
class DefenseConfig:
    """kind plus the matching parameter block."""

    kind: str
    params: object

    def __post_init__(self):
        if self.kind not in DEFENSE_KINDS:
            raise ValueError(f"unknown defense kind {self.kind!r}")
        expected = {
            "adversarial_training": AdversarialTrainingConfig,
            "dim_reduction_input": DimReductionConfig,
            "dim_reduction_embedding": DimReductionConfig,
            "prediction_similarity": PredictionSimilarityConfig,
        }[self.kind]
        if not isinstance(self.params, expected):
            raise ValueError(f"{self.kind} requires {expected.__name__} parameters")


@dataclass(frozen=True)
class DefenseReport:
    """Baseline vs defended impact over identical sample indices; the gate
    defense adds its per-query risk scores and flag count."""

    kind: str
    baseline: ImpactReport
    defended: ImpactReport
    risk_scores: tuple | None = None
    flag_count: int | None = None


# ---------------------------------------------------------------------------
# adversarial training
# ---------------------------------------------------------------------------


def adversarial_train(net, data, cfg, seed=0):
    """Retrain with the leading mix_ratio fraction of every shuffled batch
    replaced by adversarial examples against the current weights. mix_ratio
    of 0 reproduces plain train_sgd bit for bit (same seed)."""

    def hook(current, xb, yb, sel):
        k = int(round(cfg.mix_ratio * len(sel)))
        if k == 0:
            return xb
        xb = xb.copy()
        for j in range(k):
            xb[j] = craft(current, xb[j], int(yb[j]), cfg.attack, int(sel[j]))
        return xb

    return train_sgd(
        net,
        data,
        epochs=cfg.epochs,
        lr=cfg.lr,
        batch_size=cfg.batch_size,
        seed=seed,
        batch_hook=hook,
    )


# ---------------------------------------------------------------------------
# dimensionality reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Autoencoder:
    """Dense encoder -> relu bottleneck -> dense decoder -> sigmoid. The
    network's output is in [0, 1] by construction; `input_scale` maps data
    into that range and back, so embeddings (relu outputs exceeding 1) can
    be filtered too. For images in [0, 1] the scale is 1."""

    net: Network
    sample_shape: tuple
    latent_dim: int
    input_scale: float = 1.0

    def reconstruct(self, x):
        x = np.ascontiguousarray(x, dtype=F32)
        scale = F32(self.input_scale)
        out = forward(self.net, x / scale) * scale
        return out.reshape(x.shape)


def fit_autoencoder(samples, cfg, seed=0):
    """Train the reconstruction filter with SGD on mean squared error.
    Deterministic given seed; 0 epochs returns the seeded initial weights."""
    samples = np.ascontiguousarray(samples, dtype=F32)
    if samples.shape[0] < 1:
        raise ValueError("no samples to fit the autoencoder on")
    sample_shape = samples.shape[1:]
    dim = int(np.prod(sample_shape))
    latent = cfg.latent_dim if cfg.latent_dim is not None else dim // 4
    if not 1 <= latent < dim:
        raise ValueError(f"latent_dim must be in [1, {dim}), got {latent}")
    scale = float(max(1.0, samples.max()))

    rng = np.random.default_rng(seed)
    ae_net = Network(
        (
            Flatten(),
            init_dense(rng, dim, latent),
            Relu(),
            init_dense(rng, latent, dim),
            Sigmoid(),
        ),
        sample_shape,
    )
    scaled = samples / F32(scale)
    ae_net = train_mse(
        ae_net,
        scaled,
        scaled,
        epochs=cfg.epochs,
        lr=cfg.lr,
        batch_size=cfg.batch_size,
        seed=seed,
    )
    return Autoencoder(ae_net, sample_shape, latent, scale)


def _forward_layers(net, x, start, stop):
    for i in range(start, stop):
        try:
            x, _ = net.layers[i].forward(x)
        except ValueError as exc:
            raise ValueError(f"layer {i} ({net.layers[i].kind}): {exc}") from None
    return x


def embed(net, x):
    """Output of the network's embedding layer for a batch."""
    x = np.ascontiguousarray(x, dtype=F32)
    return _forward_layers(net, x, 0, net.embedding_index + 1)


def defend_input(ae, net, x):
    """Classify the autoencoder reconstruction; the base network's weights
    stay untouched."""
    return forward(net, ae.reconstruct(x))


def defend_embedding(net, ae, x):
    """Run the network up to its embedding, filter the embedding through the
    autoencoder, and resume with the remaining layers."""
    e = embed(net, x)
    if e.shape[1:] != ae.sample_shape:
        raise ValueError(
            f"embedding shape {e.shape[1:]} does not match autoencoder "
            f"input {ae.sample_shape}"
        )
    filtered = ae.reconstruct(e)
    return _forward_layers(net, filtered, net.embedding_index + 1, len(net.layers))


# ---------------------------------------------------------------------------
# prediction similarity gate
# ---------------------------------------------------------------------------


def _digest(x, max_side=16):
    """Average-pool an image down to at most max_side per spatial axis,
    bounding per-query gate cost."""
    x = np.asarray(x, dtype=F32)
    if x.ndim == 2:
        x = x[None]
    c, h, w = x.shape
    fh = math.ceil(h / max_side)
    fw = math.ceil(w / max_side)
    if fh == 1 and fw == 1:
        return x
    th, tw = (h // fh) * fh, (w // fw) * fw
    return x[:, :th, :tw].reshape(c, th // fh, fh, tw // fw, fw).mean(axis=(2, 4)).astype(F32)


class SimilarityGate:
    """FIFO history of query digests with a duplicate-similarity risk score.

    Risk for a query is the fraction of currently stored entries whose digest
    SSIM against the query's digest reaches the similarity threshold,
    computed before the query is inserted (0 for an empty history). Entries
    also keep the prediction and an insertion tick as hooks for richer
    features.
    """

    def __init__(self, cfg=PredictionSimilarityConfig()):
        self.config = cfg
        self._entries = deque(maxlen=cfg.window_capacity)
        self._tick = 0
        self.flag_count = 0

    def __len__(self):
        return len(self._entries)

    def observe(self, x, prediction):
        """Score the query against the history, then record it. Returns the
        risk in [0, 1]; queries at or above the risk threshold are counted
        as flagged."""
        d = _digest(x)
        hits = sum(
            1
            for entry in self._entries
            if ssim(d, entry[0]) >= self.config.similarity_threshold
        )
        risk = hits / len(self._entries) if self._entries else 0.0
        self._entries.append((d, int(prediction), self._tick))
        self._tick += 1
        if risk >= self.config.risk_threshold:
            self.flag_count += 1
        return risk


def gate_observe(gate, x, prediction):
    """Free-function form of SimilarityGate.observe."""
    return gate.observe(x, prediction)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def evaluate_defense(net, data, attack_cfg, defense_cfg, sample_count, seed,
                     ssim_params=SsimParams(), baseline_runs=None):
    """Attack the undefended model, then measure the same attack against the
    defense. Both legs cover identical sample indices. `baseline_runs` lets
    an orchestrator reuse attack trajectories it already computed."""
    runs = baseline_runs
    if runs is None:
        runs = run_attack(net, data, attack_cfg, sample_count, seed)
    indices = [i for i, _ in runs]
    trajectories = [t for _, t in runs]
    labels = data.labels[indices]
    baseline = build_impact_report(net, trajectories, labels, ssim_params, indices)

    kind = defense_cfg.kind
    params = defense_cfg.params
    risk_scores = None
    flag_count = None

    if kind == "adversarial_training":
        hardened = adversarial_train(net, data, params, seed=seed)
        # selection reuses the same seed, so the hardened model is attacked
        # on exactly the baseline indices
        reruns = run_attack(hardened, data, attack_cfg, sample_count, seed)
        defended = build_impact_report(
            hardened, [t for _, t in reruns], labels, ssim_params, indices
        )
    elif kind == "dim_reduction_input":
        ae = fit_autoencoder(data.inputs, params, seed=seed)
        defended = build_impact_report(
            lambda xb: defend_input(ae, net, xb), trajectories, labels, ssim_params, indices
        )
    elif kind == "dim_reduction_embedding":
        ae = fit_autoencoder(embed(net, data.inputs), params, seed=seed)
        defended = build_impact_report(
            lambda xb: defend_embedding(net, ae, xb), trajectories, labels, ssim_params, indices
        )
    else:  # prediction_similarity
        gate = SimilarityGate(params)
        risks = []
        for _, traj in runs:
            for state, pred in zip(traj.states, traj.predictions):
                risks.append(gate.observe(state, pred))
        # the gate detects probing without altering predictions
        defended = baseline
        risk_scores = tuple(risks)
        flag_count = gate.flag_count

    return DefenseReport(kind, baseline, defended, risk_scores, flag_count)
