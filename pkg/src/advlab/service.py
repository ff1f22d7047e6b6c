"""Run orchestration and wire-format plumbing shared by the API and CLI.

An attack run is: select samples -> attack each -> impact report -> neuron
explainability (frequency table, per-sample class-pair top-k, per-step
monitoring). A defense run wraps evaluate_defense and reuses the baseline
leg for explainability. Both produce a deterministic RunRecord document
whose id is a content digest of the request.
"""

from __future__ import annotations

import base64
from dataclasses import dataclass

import numpy as np

from .attacks import AttackConfig, run_attack
from .defenses import (
    AdversarialTrainingConfig,
    DefenseConfig,
    DimReductionConfig,
    PredictionSimilarityConfig,
    evaluate_defense,
)
from .metrics import SsimParams, build_impact_report
from .store import run_id_for
from .xai import class_pair_importance, compute_frequency_table, monitor, top_k

RUN_FORMAT = "advlab-run/1"


@dataclass(frozen=True)
class XaiConfig:
    """Explainability knobs; layer_index None means the model's embedding
    layer (the last hidden activation before the classifier head)."""

    layer_index: int | None = None
    tau: float = 0.0
    k: int = 10


# ---------------------------------------------------------------------------
# wire parsing (strict parameter contracts)
# ---------------------------------------------------------------------------


def _reject_unknown(block, allowed, what):
    for key in block:
        if key not in allowed:
            raise ValueError(f"{what} does not take a parameter named '{key}'")


def _number(block, key, what, required=False, default=None):
    if key not in block or block[key] is None:
        if required:
            raise ValueError(f"{what} requires a '{key}' parameter")
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{what} parameter '{key}' must be a number")
    return value


def _integer(block, key, what, required=False, default=None):
    value = _number(block, key, what, required, default)
    if value is None or isinstance(value, int):
        return value
    if float(value).is_integer():
        return int(value)
    raise ValueError(f"{what} parameter '{key}' must be an integer")


def attack_config_from_dict(block):
    """Strict parse: fgsm takes epsilon only; bim/pgd take epsilon and
    steps; unknown fields are rejected by name."""
    if not isinstance(block, dict):
        raise ValueError("attack must be an object")
    _reject_unknown(block, {"algorithm", "epsilon", "steps", "seed"}, "attack")
    algorithm = block.get("algorithm")
    if not isinstance(algorithm, str):
        raise ValueError("attack requires an 'algorithm' name")
    epsilon = _number(block, "epsilon", "attack", required=True)
    steps = _integer(block, "steps", "attack")
    seed = _integer(block, "seed", "attack", default=0)
    return AttackConfig(algorithm, float(epsilon), steps, seed)


def attack_config_to_dict(cfg):
    return {
        "algorithm": cfg.algorithm,
        "epsilon": float(cfg.epsilon),
        "steps": cfg.steps,
        "seed": cfg.seed,
    }


_DEFENSE_FIELDS = {
    "adversarial_training": {"attack", "mix_ratio", "epochs", "lr", "batch_size"},
    "dim_reduction_input": {"latent_dim", "epochs", "lr", "batch_size"},
    "dim_reduction_embedding": {"latent_dim", "epochs", "lr", "batch_size"},
    "prediction_similarity": {
        "window_capacity",
        "similarity_threshold",
        "risk_threshold",
    },
}


def defense_config_from_dict(block):
    if not isinstance(block, dict):
        raise ValueError("defense must be an object")
    kind = block.get("kind")
    if not isinstance(kind, str):
        raise ValueError(
            f"defense requires a 'kind' field, one of {sorted(_DEFENSE_FIELDS)}"
        )
    if kind not in _DEFENSE_FIELDS:
        raise ValueError(f"unknown defense kind {kind!r}")
    _reject_unknown(block, _DEFENSE_FIELDS[kind] | {"kind"}, f"defense {kind}")

    what = f"defense {kind}"
    if kind == "adversarial_training":
        if "attack" not in block:
            raise ValueError("defense adversarial_training requires fields: attack")
        defaults = AdversarialTrainingConfig(AttackConfig("fgsm", 0.0))
        params = AdversarialTrainingConfig(
            attack=attack_config_from_dict(block["attack"]),
            mix_ratio=float(_number(block, "mix_ratio", what, default=defaults.mix_ratio)),
            epochs=_integer(block, "epochs", what, default=defaults.epochs),
            lr=float(_number(block, "lr", what, default=defaults.lr)),
            batch_size=_integer(block, "batch_size", what, default=defaults.batch_size),
        )
    elif kind in ("dim_reduction_input", "dim_reduction_embedding"):
        defaults = DimReductionConfig()
        params = DimReductionConfig(
            latent_dim=_integer(block, "latent_dim", what),
            epochs=_integer(block, "epochs", what, default=defaults.epochs),
            lr=float(_number(block, "lr", what, default=defaults.lr)),
            batch_size=_integer(block, "batch_size", what, default=defaults.batch_size),
        )
    else:
        defaults = PredictionSimilarityConfig()
        params = PredictionSimilarityConfig(
            window_capacity=_integer(
                block, "window_capacity", what, default=defaults.window_capacity
            ),
            similarity_threshold=float(
                _number(block, "similarity_threshold", what,
                        default=defaults.similarity_threshold)
            ),
            risk_threshold=float(
                _number(block, "risk_threshold", what, default=defaults.risk_threshold)
            ),
        )
    return DefenseConfig(kind, params)


def defense_config_to_dict(cfg):
    p = cfg.params
    if cfg.kind == "adversarial_training":
        body = {
            "attack": attack_config_to_dict(p.attack),
            "mix_ratio": p.mix_ratio,
            "epochs": p.epochs,
            "lr": p.lr,
            "batch_size": p.batch_size,
        }
    elif cfg.kind in ("dim_reduction_input", "dim_reduction_embedding"):
        body = {
            "latent_dim": p.latent_dim,
            "epochs": p.epochs,
            "lr": p.lr,
            "batch_size": p.batch_size,
        }
    else:
        body = {
            "window_capacity": p.window_capacity,
            "similarity_threshold": p.similarity_threshold,
            "risk_threshold": p.risk_threshold,
        }
    return {"kind": cfg.kind, **body}


# ---------------------------------------------------------------------------
# record serialization
# ---------------------------------------------------------------------------


def tensor_to_json(arr):
    arr = np.ascontiguousarray(arr, dtype="<f4")
    return {
        "shape": list(arr.shape),
        "dtype": "float32",
        "data": base64.b64encode(arr.tobytes()).decode("ascii"),
    }


def tensor_from_json(block):
    raw = base64.b64decode(block["data"])
    return np.frombuffer(raw, dtype="<f4").reshape(block["shape"]).copy()


def impact_report_to_json(report):
    return {
        "original_accuracy": report.original_accuracy,
        "adversarial_accuracy": report.adversarial_accuracy,
        "similarity_avg": report.similarity_avg,
        "similarity_max": report.similarity_max,
        "similarity_min": report.similarity_min,
        "grade": report.grade,
        "samples": [
            {
                "index": s.index,
                "true_label": s.true_label,
                "original_prediction": s.original_prediction,
                "adversarial_prediction": s.adversarial_prediction,
                "similarity": s.similarity,
                "original": tensor_to_json(s.original),
                "adversarial": tensor_to_json(s.adversarial),
                "diff": tensor_to_json(s.diff),
            }
            for s in report.samples
        ],
    }


def _ranking_to_json(ranking, k):
    return [
        {
            "neuron": e.neuron,
            "freq_a": e.freq_a,
            "freq_b": e.freq_b,
            "difference": e.difference,
        }
        for e in ranking.entries[:k]
    ]


def _runner_up(probabilities):
    order = np.argsort(probabilities)
    return int(order[-2])


def build_explain_payload(net, dataset, runs, xai_cfg):
    """Frequency table on the loaded dataset plus, per attacked sample, the
    (original prediction, final prediction) class-pair ranking and the
    monitored top-k neuron traces. When the attack failed to flip a sample,
    the runner-up class at the final state stands in for the target class."""
    layer_index = (
        xai_cfg.layer_index if xai_cfg.layer_index is not None else net.embedding_index
    )
    table = compute_frequency_table(net, dataset, layer_index, xai_cfg.tau)
    samples = []
    for idx, traj in runs:
        c = traj.predictions[0]
        c_prime = traj.predictions[-1]
        if c_prime == c:
            c_prime = _runner_up(traj.probabilities[-1])
        ranking = class_pair_importance(table, c, c_prime)
        neurons = top_k(ranking, xai_cfg.k)
        trace = monitor(net, traj, neurons, layer_index)
        samples.append(
            {
                "index": idx,
                "class_pair": [int(c), int(c_prime)],
                "ranking": _ranking_to_json(ranking, xai_cfg.k),
                "monitor": {
                    "neurons": list(trace.neurons),
                    "values": [[float(v) for v in row] for row in trace.values],
                    "predictions": [int(p) for p in trace.predictions],
                },
            }
        )
    return {
        "layer_index": layer_index,
        "tau": xai_cfg.tau,
        "k": xai_cfg.k,
        "class_counts": [int(c) for c in table.class_counts],
        "frequencies": [[float(f) for f in row] for row in table.frequencies],
        "samples": samples,
    }


# ---------------------------------------------------------------------------
# run pipelines
# ---------------------------------------------------------------------------


def _request_block(kind, model, dataset, attack_cfg, defense_cfg, sample_count, seed,
                   xai_cfg, layer_index):
    return {
        "kind": kind,
        "model_id": model.model_id,
        "dataset_id": dataset.dataset_id,
        "attack": attack_config_to_dict(attack_cfg),
        "defense": None if defense_cfg is None else defense_config_to_dict(defense_cfg),
        "sample_count": sample_count,
        "seed": seed,
        "xai": {"layer_index": layer_index, "tau": xai_cfg.tau, "k": xai_cfg.k},
    }


def _resolve_layer(model, xai_cfg):
    return (
        xai_cfg.layer_index
        if xai_cfg.layer_index is not None
        else model.network.embedding_index
    )


def evaluate_attack_run(model, dataset, attack_cfg, sample_count, seed,
                        xai_cfg=XaiConfig()):
    """run_attack -> impact report -> explainability, as one RunRecord."""
    net = model.network
    runs = run_attack(net, dataset.data, attack_cfg, sample_count, seed)
    indices = [i for i, _ in runs]
    trajectories = [t for _, t in runs]
    labels = dataset.data.labels[indices]
    report = build_impact_report(net, trajectories, labels, SsimParams(), indices)
    explain = build_explain_payload(net, dataset.data, runs, xai_cfg)
    request = _request_block(
        "attack", model, dataset, attack_cfg, None, sample_count, seed, xai_cfg,
        _resolve_layer(model, xai_cfg),
    )
    return {
        "format": RUN_FORMAT,
        "run_id": run_id_for(request),
        "kind": "attack",
        "request": request,
        "report": impact_report_to_json(report),
        "explain": explain,
    }


def evaluate_defense_run(model, dataset, attack_cfg, defense_cfg, sample_count, seed,
                         xai_cfg=XaiConfig()):
    """evaluate_defense wrapped into a RunRecord; explainability covers the
    baseline (undefended) leg."""
    net = model.network
    baseline_runs = run_attack(net, dataset.data, attack_cfg, sample_count, seed)
    defense_report = evaluate_defense(
        net, dataset.data, attack_cfg, defense_cfg, sample_count, seed,
        baseline_runs=baseline_runs,
    )
    explain = build_explain_payload(net, dataset.data, baseline_runs, xai_cfg)
    request = _request_block(
        "defense", model, dataset, attack_cfg, defense_cfg, sample_count, seed, xai_cfg,
        _resolve_layer(model, xai_cfg),
    )
    report = {
        "kind": defense_report.kind,
        "baseline": impact_report_to_json(defense_report.baseline),
        "defended": impact_report_to_json(defense_report.defended),
    }
    if defense_report.risk_scores is not None:
        report["risk_scores"] = [float(r) for r in defense_report.risk_scores]
        report["flag_count"] = defense_report.flag_count
    return {
        "format": RUN_FORMAT,
        "run_id": run_id_for(request),
        "kind": "defense",
        "request": request,
        "report": report,
        "explain": explain,
    }
