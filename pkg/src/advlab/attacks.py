"""L-infinity bounded evasion attacks: FGSM, BIM, and PGD.

Every attack records the full per-step trajectory (state 0 is the untouched
original) together with the model's prediction at each state, which feeds
the neuron-monitoring explainability view.

Step size for the iterative attacks is epsilon / steps, so BIM with one step
degenerates exactly to FGSM. sign(0) is 0. All states are kept inside the
epsilon ball around the original and inside the valid pixel range [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .net import F32, LabeledBatch, forward, grad_input

ALGORITHMS = ("fgsm", "bim", "pgd")


@dataclass(frozen=True)
class AttackConfig:
    """Operator's attack choice. fgsm takes epsilon only; bim and pgd take
    (epsilon, steps); the seed drives pgd's random start."""

    algorithm: str
    epsilon: float
    steps: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown attack algorithm {self.algorithm!r}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.algorithm == "fgsm":
            if self.steps is not None:
                raise ValueError("fgsm takes no 'steps' parameter")
        else:
            if self.steps is None:
                raise ValueError(f"{self.algorithm} requires a 'steps' parameter")
            if self.steps < 1:
                raise ValueError(f"steps must be >= 1, got {self.steps}")


@dataclass(frozen=True)
class AttackTrajectory:
    """States x_0 ... x_T with the model's prediction at each state."""

    states: tuple  # of float32 arrays, one sample each
    predictions: tuple  # of int
    probabilities: tuple  # of float32 vectors

    def __len__(self):
        return len(self.states)

    @property
    def original(self):
        return self.states[0]

    @property
    def adversarial(self):
        return self.states[-1]


def _predict_one(net, x):
    p = forward(net, x[None])[0]
    return int(p.argmax()), p


def _finish(net, states):
    preds, probs = [], []
    for s in states:
        c, p = _predict_one(net, s)
        preds.append(c)
        probs.append(p)
    return AttackTrajectory(tuple(states), tuple(preds), tuple(probs))


def _loss_grad(net, x, y):
    return grad_input(net, LabeledBatch(x[None], [y]))[0]


def _project(x, x0, epsilon):
    x = np.clip(x, x0 - F32(epsilon), x0 + F32(epsilon))
    return np.clip(x, F32(0), F32(1))


def _fgsm_states(net, x, y, epsilon):
    g = _loss_grad(net, x, y)
    adv = np.clip(x + F32(epsilon) * np.sign(g), F32(0), F32(1))
    return [x, adv]


def _iterate_states(net, x, y, epsilon, steps, start):
    alpha = F32(epsilon / steps)
    states = [x]
    cur = start
    for _ in range(steps):
        g = _loss_grad(net, cur, y)
        cur = _project(cur + alpha * np.sign(g), x, epsilon)
        states.append(cur)
    return states


def _pgd_start(x, epsilon, seed):
    rng = np.random.default_rng(seed)
    noise = rng.uniform(-epsilon, epsilon, size=x.shape).astype(F32)
    return np.clip(x + noise, F32(0), F32(1))


def _states(net, x, y, cfg, sample_index):
    x = np.ascontiguousarray(x, dtype=F32)
    if cfg.algorithm == "fgsm":
        return _fgsm_states(net, x, y, cfg.epsilon)
    if cfg.algorithm == "bim":
        return _iterate_states(net, x, y, cfg.epsilon, cfg.steps, x)
    start = _pgd_start(x, cfg.epsilon, cfg.seed ^ sample_index)
    return _iterate_states(net, x, y, cfg.epsilon, cfg.steps, start)


def fgsm(net, x, y, epsilon):
    """One step of size epsilon in the sign of the input gradient."""
    return attack_sample(net, x, y, AttackConfig("fgsm", epsilon))


def bim(net, x, y, epsilon, steps):
    """Iterated FGSM with per-step projection onto the epsilon ball and the
    valid pixel range."""
    return attack_sample(net, x, y, AttackConfig("bim", epsilon, steps))


def pgd(net, x, y, epsilon, steps, seed):
    """BIM with a seeded uniform random start inside the epsilon ball."""
    return attack_sample(net, x, y, AttackConfig("pgd", epsilon, steps, seed), 0)


def attack_sample(net, x, y, cfg, sample_index=0):
    """Run one attack, recording the trajectory and per-state predictions.
    pgd derives its generator as seed XOR sample index so per-sample runs
    are schedule-independent."""
    return _finish(net, _states(net, x, y, cfg, sample_index))


def craft(net, x, y, cfg, sample_index=0):
    """Adversarial example only, skipping trajectory prediction bookkeeping
    (used by adversarial training, which discards intermediate states)."""
    return _states(net, x, y, cfg, sample_index)[-1]


def run_attack(net, data, cfg, sample_count, seed):
    """Attack `sample_count` samples drawn uniformly without replacement from
    a generator seeded with `seed`. Returns [(sample index, trajectory)]."""
    n = len(data)
    if n < 1:
        raise ValueError("dataset is empty")
    if not 1 <= sample_count <= n:
        raise ValueError(f"sample_count must be in [1, {n}], got {sample_count}")
    rng = np.random.default_rng(seed)
    indices = np.sort(rng.choice(n, size=sample_count, replace=False))
    results = []
    for idx in indices:
        idx = int(idx)
        traj = attack_sample(net, data.inputs[idx], int(data.labels[idx]), cfg, idx)
        results.append((idx, traj))
    return results
