"""Neuron-activation-frequency explainability.

Per class c and neuron n, F_c(n) is the fraction of class-c samples on which
the neuron's post-activation exceeds the threshold tau (default 0, suited to
relu layers). A class pair (c, c') ranks neurons by |F_c - F_c'| descending;
the top-k of that ranking are monitored across an attack trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .net import forward_full, record_activations

DEFAULT_TOP_K = 10


@dataclass(frozen=True)
class FrequencyTable:
    """Activation frequencies per (class, neuron) at one layer."""

    layer_index: int
    tau: float
    frequencies: np.ndarray  # (class_count, width), float64, unrounded
    class_counts: np.ndarray  # samples per class

    @property
    def width(self):
        return self.frequencies.shape[1]


@dataclass(frozen=True)
class RankedNeuron:
    neuron: int
    freq_a: float
    freq_b: float
    difference: float


@dataclass(frozen=True)
class ImportanceRanking:
    """Neurons ordered by |F_c - F_c'| descending, ties by neuron index."""

    class_a: int
    class_b: int
    entries: tuple


@dataclass(frozen=True)
class MonitorTrace:
    """Activation of each monitored neuron at every trajectory state."""

    layer_index: int
    neurons: tuple
    values: np.ndarray  # (len(neurons), trajectory length) float32
    predictions: tuple  # predicted class at each state


def compute_frequency_table(net, data, layer_index, tau=0.0):
    """Count activation frequencies per class at one layer over a dataset."""
    if not 0 <= layer_index < len(net.layers):
        raise ValueError(f"layer index {layer_index} out of range [0, {len(net.layers)})")
    outs, _ = forward_full(net, data.inputs)
    acts = outs[layer_index].reshape(len(data), -1)
    active = acts > np.float32(tau)

    classes = net.class_count
    counts = np.bincount(data.labels, minlength=classes)
    for c in range(classes):
        if counts[c] == 0:
            raise ValueError(f"class {c} has no samples")
    freq = np.empty((classes, active.shape[1]))
    for c in range(classes):
        freq[c] = active[data.labels == c].mean(axis=0)
    return FrequencyTable(layer_index, float(tau), freq, counts[:classes])


def class_pair_importance(table, c, c_prime):
    """Rank neurons for the class pair (c, c') by frequency difference."""
    classes = table.frequencies.shape[0]
    for label in (c, c_prime):
        if not 0 <= label < classes:
            raise ValueError(f"class {label} out of range [0, {classes})")
    if c == c_prime:
        raise ValueError("class pair must be two distinct classes")
    fa = table.frequencies[c]
    fb = table.frequencies[c_prime]
    diff = np.abs(fa - fb)
    neurons = np.arange(table.width)
    order = np.lexsort((neurons, -diff))
    entries = tuple(
        RankedNeuron(int(n), float(fa[n]), float(fb[n]), float(diff[n])) for n in order
    )
    return ImportanceRanking(int(c), int(c_prime), entries)


def top_k(ranking, k=DEFAULT_TOP_K):
    """Indices of the k highest-difference neurons (fewer if the layer is
    narrower than k)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return [entry.neuron for entry in ranking.entries[:k]]


def monitor(net, trajectory, neurons, layer_index):
    """Record the listed neurons' post-activations at every attack step."""
    probe = record_activations(net, trajectory.states[0], layer_index)
    for n in neurons:
        if not 0 <= n < probe.size:
            raise ValueError(f"neuron {n} out of range for layer width {probe.size}")
    values = np.empty((len(neurons), len(trajectory)), dtype=np.float32)
    for t, state in enumerate(trajectory.states):
        trace = record_activations(net, state, layer_index)
        values[:, t] = trace[list(neurons)]
    return MonitorTrace(layer_index, tuple(int(n) for n in neurons), values,
                        trajectory.predictions)
