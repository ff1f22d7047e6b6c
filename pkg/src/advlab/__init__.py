"""advlab: an adversarial-robustness workbench.

Load a small network and dataset, generate L-inf bounded adversarial
examples (FGSM/BIM/PGD), evaluate defenses (adversarial training,
autoencoder filtering, prediction-similarity gating), and explain
misclassification via neuron-activation-frequency monitoring — through a
Python API, a REST service, and a CLI.
"""

from .attacks import AttackConfig, AttackTrajectory, bim, fgsm, pgd, run_attack
from .defenses import (
    AdversarialTrainingConfig,
    Autoencoder,
    DefenseConfig,
    DefenseReport,
    DimReductionConfig,
    PredictionSimilarityConfig,
    SimilarityGate,
    adversarial_train,
    defend_embedding,
    defend_input,
    evaluate_defense,
    fit_autoencoder,
)
from .metrics import ImpactReport, SsimParams, build_impact_report, diff_image, grade, ssim
from .net import (
    LabeledBatch,
    Network,
    cross_entropy,
    forward,
    grad_input,
    grad_weights,
    record_activations,
    train_sgd,
)
from .xai import (
    FrequencyTable,
    ImportanceRanking,
    MonitorTrace,
    class_pair_importance,
    compute_frequency_table,
    monitor,
    top_k,
)

__version__ = "0.1.0"
