"""Minimal differentiable network engine.

Supports the layer vocabulary {dense, conv2d, relu, sigmoid, maxpool2,
flatten, softmax} with exact forward passes, cross-entropy loss, gradients
with respect to inputs and weights, activation recording, and a seeded SGD
training loop.

Conventions:
  - tensors are float32; reductions accumulate in float64; the backward
    chain is carried in float64 and cast to float32 at API boundaries
  - relu subgradient at 0 is 0; maxpool ties route to the first maximal
    element of the window in row-major order
  - networks are immutable; training returns a new Network
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels

F32 = np.float32

LAYER_KINDS = ("dense", "conv2d", "relu", "sigmoid", "maxpool2", "flatten", "softmax")


# ---------------------------------------------------------------------------
# layers
# ---------------------------------------------------------------------------


class Dense:
    kind = "dense"

    def __init__(self, weights, bias):
        w = np.ascontiguousarray(weights, dtype=F32)
        b = np.ascontiguousarray(bias, dtype=F32)
        if w.ndim != 2:
            raise ValueError(f"dense weights must be 2-d (out, in), got shape {w.shape}")
        if b.shape != (w.shape[0],):
            raise ValueError(f"dense bias shape {b.shape} does not match out={w.shape[0]}")
        self.weights = w
        self.bias = b

    def out_shape(self, in_shape):
        if len(in_shape) != 1 or in_shape[0] != self.weights.shape[1]:
            raise ValueError(
                f"dense expects flat input of width {self.weights.shape[1]}, got {in_shape}"
            )
        return (self.weights.shape[0],)

    def forward(self, x):
        y = (x.astype(np.float64) @ self.weights.T.astype(np.float64)
             + self.bias.astype(np.float64)).astype(F32)
        return y, x

    def backward(self, gy, x):
        w64 = self.weights.astype(np.float64)
        gx = gy @ w64
        gw = gy.T @ x.astype(np.float64)
        gb = gy.sum(axis=0)
        return gx, {"weights": gw, "bias": gb}

    def with_params(self, weights, bias):
        return Dense(weights, bias)


class Conv2d:
    kind = "conv2d"

    def __init__(self, weights, bias, padding="valid"):
        w = np.ascontiguousarray(weights, dtype=F32)
        b = np.ascontiguousarray(bias, dtype=F32)
        if w.ndim != 4:
            raise ValueError(f"conv2d weights must be 4-d (out_ch, in_ch, kh, kw), got {w.shape}")
        if b.shape != (w.shape[0],):
            raise ValueError(f"conv2d bias shape {b.shape} does not match out_ch={w.shape[0]}")
        if padding not in ("valid", "same"):
            raise ValueError(f"conv2d padding must be 'valid' or 'same', got {padding!r}")
        self.weights = w
        self.bias = b
        self.padding = padding

    def _pads(self):
        kh, kw = self.weights.shape[2:]
        if self.padding == "valid":
            return (0, 0, 0, 0)
        return ((kh - 1) // 2, kh - 1 - (kh - 1) // 2, (kw - 1) // 2, kw - 1 - (kw - 1) // 2)

    def out_shape(self, in_shape):
        cout, cin, kh, kw = self.weights.shape
        if len(in_shape) != 3 or in_shape[0] != cin:
            raise ValueError(f"conv2d expects input ({cin}, h, w), got {in_shape}")
        pt, pb, pl, pr = self._pads()
        ho = in_shape[1] + pt + pb - kh + 1
        wo = in_shape[2] + pl + pr - kw + 1
        if ho < 1 or wo < 1:
            raise ValueError(f"conv2d kernel {kh}x{kw} larger than input {in_shape}")
        return (cout, ho, wo)

    def forward(self, x):
        y = kernels.conv2d_forward(x, self.weights, self.bias, self._pads())
        return y, x

    def backward(self, gy, x):
        pads = self._pads()
        gx = kernels.conv2d_grad_input(gy, self.weights, x.shape, pads)
        gw, gb = kernels.conv2d_grad_weights(gy, x, self.weights.shape, pads)
        return gx, {"weights": gw, "bias": gb}

    def with_params(self, weights, bias):
        return Conv2d(weights, bias, self.padding)


class Relu:
    kind = "relu"

    def out_shape(self, in_shape):
        return in_shape

    def forward(self, x):
        return np.maximum(x, F32(0)), x

    def backward(self, gy, x):
        return gy * (x > 0), None


class Sigmoid:
    kind = "sigmoid"

    def out_shape(self, in_shape):
        return in_shape

    def forward(self, x):
        z = x.astype(np.float64)
        y64 = np.where(z >= 0, 1.0 / (1.0 + np.exp(-np.abs(z))),
                       np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))
        return y64.astype(F32), y64

    def backward(self, gy, y64):
        return gy * y64 * (1.0 - y64), None


class Maxpool2:
    kind = "maxpool2"

    def out_shape(self, in_shape):
        if len(in_shape) != 3:
            raise ValueError(f"maxpool2 expects input (c, h, w), got {in_shape}")
        c, h, w = in_shape
        if h % 2 or w % 2:
            raise ValueError(f"maxpool2 requires even spatial extents, got {h}x{w}")
        return (c, h // 2, w // 2)

    def forward(self, x):
        y, idx = kernels.maxpool2_forward(x)
        return y, (idx, x.shape)

    def backward(self, gy, cache):
        idx, x_shape = cache
        return kernels.maxpool2_backward(gy, idx, x_shape), None


class Flatten:
    kind = "flatten"

    def out_shape(self, in_shape):
        return (int(np.prod(in_shape)),)

    def forward(self, x):
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, gy, x_shape):
        return gy.reshape(x_shape), None


class Softmax:
    kind = "softmax"

    def out_shape(self, in_shape):
        if len(in_shape) != 1:
            raise ValueError(f"softmax expects flat input, got {in_shape}")
        return in_shape

    def forward(self, x):
        z = x.astype(np.float64)
        z = z - z.max(axis=1, keepdims=True)
        e = np.exp(z)
        p64 = e / e.sum(axis=1, keepdims=True)
        return p64.astype(F32), p64

    def backward(self, gy, p64):
        return p64 * (gy - (gy * p64).sum(axis=1, keepdims=True)), None


# ---------------------------------------------------------------------------
# network
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Network:
    """Immutable ordered layer stack.

    `input_shape` is the shape of one sample, e.g. (c, h, w) or (d,).
    `class_count` and `embedding_index` are classifier metadata; autoencoder
    networks leave them at their defaults.
    """

    layers: tuple
    input_shape: tuple
    class_count: int = 0
    embedding_index: int = -1

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "input_shape", tuple(int(d) for d in self.input_shape))


@dataclass(frozen=True)
class LabeledBatch:
    """Inputs of shape (n, *sample_shape) with integer class labels."""

    inputs: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "inputs", np.ascontiguousarray(self.inputs, dtype=F32))
        object.__setattr__(self, "labels", np.ascontiguousarray(self.labels, dtype=np.int64))
        if self.inputs.shape[0] < 1:
            raise ValueError("batch must contain at least one sample")
        if self.labels.shape != (self.inputs.shape[0],):
            raise ValueError(
                f"{self.labels.shape[0] if self.labels.ndim else 0} labels "
                f"for {self.inputs.shape[0]} inputs"
            )
        if self.labels.size and self.labels.min() < 0:
            raise ValueError("labels must be non-negative class indices")

    def __len__(self):
        return self.inputs.shape[0]


def infer_shapes(net):
    """Propagate the per-sample shape through every layer.

    Returns the list of output shapes (one per layer). Raises ValueError
    naming the first incompatible layer.
    """
    shape = net.input_shape
    shapes = []
    for i, layer in enumerate(net.layers):
        try:
            shape = layer.out_shape(shape)
        except ValueError as exc:
            raise ValueError(f"layer {i} ({layer.kind}): {exc}") from None
        shapes.append(shape)
    return shapes


def validate_classifier(net):
    """Check the classifier invariants: softmax head matching class_count,
    composition-compatible shapes, valid embedding index."""
    if not net.layers:
        raise ValueError("network has no layers")
    shapes = infer_shapes(net)
    if net.layers[-1].kind != "softmax":
        raise ValueError(f"layer {len(net.layers) - 1}: final layer must be softmax, "
                         f"got {net.layers[-1].kind}")
    if net.class_count < 1:
        raise ValueError(f"class_count must be positive, got {net.class_count}")
    if shapes[-1] != (net.class_count,):
        raise ValueError(f"softmax output width {shapes[-1][0]} != class_count {net.class_count}")
    if not 0 <= net.embedding_index < len(net.layers):
        raise ValueError(f"embedding_index {net.embedding_index} out of range")
    return shapes


# ---------------------------------------------------------------------------
# forward / backward
# ---------------------------------------------------------------------------


def forward_full(net, x):
    """Run every layer; returns (per-layer outputs, per-layer caches)."""
    x = np.ascontiguousarray(x, dtype=F32)
    if x.shape[1:] != net.input_shape:
        raise ValueError(f"input shape {x.shape[1:]} does not match network "
                         f"input shape {net.input_shape}")
    outs, caches = [], []
    for i, layer in enumerate(net.layers):
        try:
            x, cache = layer.forward(x)
        except ValueError as exc:
            raise ValueError(f"layer {i} ({layer.kind}): {exc}") from None
        outs.append(x)
        caches.append(cache)
    return outs, caches


def forward(net, x):
    """Class probabilities for a batch; rows sum to 1 within 1e-5."""
    outs, _ = forward_full(net, x)
    return outs[-1]


def cross_entropy(probabilities, labels):
    """Mean over the batch of -log p[label], with p clamped below by 1e-12."""
    p = np.asarray(probabilities, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if p.ndim != 2:
        raise ValueError(f"probabilities must be 2-d, got shape {p.shape}")
    row_sums = p.sum(axis=1)
    if np.abs(row_sums - 1.0).max() > 1e-5:
        raise ValueError("probability rows must sum to 1 within 1e-5")
    if labels.min() < 0 or labels.max() >= p.shape[1]:
        raise ValueError(f"label out of range [0, {p.shape[1]})")
    picked = p[np.arange(p.shape[0]), labels]
    return float(-np.log(np.maximum(picked, 1e-12)).mean())


def _ce_grad_logits(p64, labels):
    """d(mean cross-entropy)/d(softmax input) = (p - onehot) / n, exact."""
    n = p64.shape[0]
    g = p64.copy()
    g[np.arange(n), labels] -= 1.0
    return g / n


def _backward(net, caches, grad_out, *, stop_at=0, skip_last=False):
    """Chain gradients from the output back to layer `stop_at`.

    Returns (grad wrt the input of layer stop_at, per-layer param grads).
    `skip_last` starts the chain below the final layer (used when grad_out
    is already d/d(softmax input)).
    """
    last = len(net.layers) - (2 if skip_last else 1)
    g = grad_out
    param_grads = [None] * len(net.layers)
    for i in range(last, stop_at - 1, -1):
        g, pg = net.layers[i].backward(g, caches[i])
        param_grads[i] = pg
    return g, param_grads


def _check_classifier_head(net):
    if not net.layers or net.layers[-1].kind != "softmax":
        raise ValueError("cross-entropy gradients require a softmax final layer")


def grad_input(net, batch):
    """Gradient of the mean cross-entropy loss with respect to the inputs."""
    _check_classifier_head(net)
    _check_labels(net, batch)
    outs, caches = forward_full(net, batch.inputs)
    g0 = _ce_grad_logits(caches[-1], batch.labels)
    gx, _ = _backward(net, caches, g0, skip_last=True)
    return gx.astype(F32)


def grad_weights(net, batch):
    """Per-layer gradients of the mean cross-entropy loss; entries are
    {'weights','bias'} dicts (float64) or None for parameterless layers."""
    _check_classifier_head(net)
    _check_labels(net, batch)
    outs, caches = forward_full(net, batch.inputs)
    g0 = _ce_grad_logits(caches[-1], batch.labels)
    _, pgrads = _backward(net, caches, g0, skip_last=True)
    return pgrads


def _check_labels(net, batch):
    if net.class_count and batch.labels.max() >= net.class_count:
        raise ValueError(f"label out of range [0, {net.class_count})")


def record_activations(net, sample, layer_index):
    """Flat float32 vector of layer `layer_index` post-activations for one
    sample; values are bit-identical to the forward pass intermediates."""
    if not 0 <= layer_index < len(net.layers):
        raise ValueError(f"layer index {layer_index} out of range "
                         f"[0, {len(net.layers)})")
    sample = np.asarray(sample, dtype=F32)
    outs, _ = forward_full(net, sample[None])
    return outs[layer_index][0].ravel().copy()


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------


def _apply_sgd_update(layers, param_grads, lr):
    lr32 = F32(lr)
    for i, pg in enumerate(param_grads):
        if pg is None:
            continue
        layer = layers[i]
        w = layer.weights - lr32 * pg["weights"].astype(F32)
        b = layer.bias - lr32 * pg["bias"].astype(F32)
        layers[i] = layer.with_params(w, b)


def train_sgd(net, data, *, epochs, lr, batch_size=32, seed=0, batch_hook=None):
    """Seeded minibatch SGD on cross-entropy. Returns a new Network; the
    input network is never mutated. epochs=0 returns the input unchanged.

    `batch_hook(current_net, xb, yb, indices)` may replace batch inputs
    before the gradient step (used by adversarial training).
    """
    if epochs < 0:
        raise ValueError("epochs must be >= 0")
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    if len(data) < 1:
        raise ValueError("training data is empty")
    _check_classifier_head(net)
    _check_labels(net, data)
    if epochs == 0:
        return net

    rng = np.random.default_rng(seed)
    layers = list(net.layers)
    n = len(data)
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            sel = order[start : start + batch_size]
            xb = data.inputs[sel]
            yb = data.labels[sel]
            current = replace(net, layers=tuple(layers))
            if batch_hook is not None:
                xb = batch_hook(current, xb, yb, sel)
            _, caches = forward_full(current, xb)
            g0 = _ce_grad_logits(caches[-1], yb)
            _, pgrads = _backward(current, caches, g0, skip_last=True)
            _apply_sgd_update(layers, pgrads, lr)
    return replace(net, layers=tuple(layers))


def train_mse(net, inputs, targets, *, epochs, lr, batch_size=32, seed=0):
    """Seeded minibatch SGD on mean squared reconstruction error.

    Used for autoencoders; the final layer is arbitrary (typically sigmoid).
    """
    if epochs < 0:
        raise ValueError("epochs must be >= 0")
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    inputs = np.ascontiguousarray(inputs, dtype=F32)
    targets = np.ascontiguousarray(targets, dtype=F32)
    if inputs.shape[0] < 1:
        raise ValueError("training data is empty")
    if epochs == 0:
        return net

    rng = np.random.default_rng(seed)
    layers = list(net.layers)
    n = inputs.shape[0]
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            sel = order[start : start + batch_size]
            xb = inputs[sel]
            tb = targets[sel].reshape(xb.shape[0], -1)
            current = replace(net, layers=tuple(layers))
            outs, caches = forward_full(current, xb)
            gout = 2.0 * (outs[-1].astype(np.float64) - tb.astype(np.float64)) / outs[-1].size
            _, pgrads = _backward(current, caches, gout)
            _apply_sgd_update(layers, pgrads, lr)
    return replace(net, layers=tuple(layers))


def mse(net, inputs, targets):
    """Mean squared error of the network output against flat targets."""
    inputs = np.ascontiguousarray(inputs, dtype=F32)
    out = forward(net, inputs).astype(np.float64)
    t = np.asarray(targets, dtype=np.float64).reshape(out.shape)
    return float(((out - t) ** 2).mean())


# ---------------------------------------------------------------------------
# initialization
# ---------------------------------------------------------------------------


def init_dense(rng, in_features, out_features):
    """He-initialized dense layer."""
    scale = math.sqrt(2.0 / in_features)
    w = (rng.standard_normal((out_features, in_features)) * scale).astype(F32)
    return Dense(w, np.zeros(out_features, dtype=F32))


def init_conv2d(rng, in_ch, out_ch, kernel, padding="valid"):
    """He-initialized conv2d layer with square kernel."""
    scale = math.sqrt(2.0 / (in_ch * kernel * kernel))
    w = (rng.standard_normal((out_ch, in_ch, kernel, kernel)) * scale).astype(F32)
    return Conv2d(w, np.zeros(out_ch, dtype=F32), padding)
