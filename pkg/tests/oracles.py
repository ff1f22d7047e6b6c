"""Independent reference implementations used as test oracles.

Everything here is straight-line float64 NumPy, written without touching the
package's kernels or layer classes, so agreement between the two paths is
meaningful. Keep these dumb and obvious.
"""

import numpy as np


def _conv_pads(layer):
    kh, kw = np.asarray(layer.weights).shape[2:]
    if layer.padding == "valid":
        return (0, 0, 0, 0)
    return ((kh - 1) // 2, kh - 1 - (kh - 1) // 2, (kw - 1) // 2, kw - 1 - (kw - 1) // 2)


def oracle_forward(net, x):
    """Float64 forward pass over all layer kinds, loop-based."""
    a = np.asarray(x, dtype=np.float64)
    for layer in net.layers:
        kind = layer.kind
        if kind == "dense":
            w = np.asarray(layer.weights, dtype=np.float64)
            b = np.asarray(layer.bias, dtype=np.float64)
            a = a @ w.T + b
        elif kind == "conv2d":
            w = np.asarray(layer.weights, dtype=np.float64)
            b = np.asarray(layer.bias, dtype=np.float64)
            pt, pb, pl, pr = _conv_pads(layer)
            ap = np.pad(a, ((0, 0), (0, 0), (pt, pb), (pl, pr)))
            n, cin, hp, wp = ap.shape
            cout, _, kh, kw = w.shape
            ho, wo = hp - kh + 1, wp - kw + 1
            out = np.empty((n, cout, ho, wo))
            for oy in range(ho):
                for ox in range(wo):
                    patch = ap[:, :, oy : oy + kh, ox : ox + kw]
                    for co in range(cout):
                        out[:, co, oy, ox] = (patch * w[co]).sum(axis=(1, 2, 3)) + b[co]
            a = out
        elif kind == "relu":
            a = np.maximum(a, 0.0)
        elif kind == "sigmoid":
            a = 1.0 / (1.0 + np.exp(-a))
        elif kind == "maxpool2":
            n, c, h, w_ = a.shape
            out = np.empty((n, c, h // 2, w_ // 2))
            for y in range(h // 2):
                for x_ in range(w_ // 2):
                    out[:, :, y, x_] = a[:, :, 2 * y : 2 * y + 2, 2 * x_ : 2 * x_ + 2].max(
                        axis=(2, 3)
                    )
            a = out
        elif kind == "flatten":
            a = a.reshape(a.shape[0], -1)
        elif kind == "softmax":
            z = a - a.max(axis=1, keepdims=True)
            e = np.exp(z)
            a = e / e.sum(axis=1, keepdims=True)
        else:
            raise AssertionError(f"oracle does not know layer kind {kind!r}")
    return a


def oracle_cross_entropy(probs, labels):
    p = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    picked = p[np.arange(p.shape[0]), labels]
    return float(-np.log(np.maximum(picked, 1e-12)).mean())


def oracle_loss(net, x, labels):
    return oracle_cross_entropy(oracle_forward(net, x), labels)


def fd_grad_input(net, x, labels, h=1e-3):
    """Central finite differences of the oracle loss wrt every input element."""
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = g.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        lp = oracle_loss(net, x, labels)
        flat[i] = orig - h
        lm = oracle_loss(net, x, labels)
        flat[i] = orig
        gflat[i] = (lp - lm) / (2.0 * h)
    return g


def fd_grad_params(net, x, labels, layer_index, name, h=1e-3):
    """Central finite differences wrt one layer's 'weights' or 'bias'."""
    layer = net.layers[layer_index]
    base = np.asarray(getattr(layer, name), dtype=np.float64).copy()
    g = np.zeros_like(base)
    flat = base.reshape(-1)
    gflat = g.reshape(-1)

    def swap(values):
        new_layer = layer.with_params(
            values if name == "weights" else layer.weights,
            values if name == "bias" else layer.bias,
        )
        layers = list(net.layers)
        layers[layer_index] = new_layer
        return type(net)(tuple(layers), net.input_shape, net.class_count, net.embedding_index)

    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        lp = oracle_loss(swap(base), x, labels)
        flat[i] = orig - h
        lm = oracle_loss(swap(base), x, labels)
        flat[i] = orig
        gflat[i] = (lp - lm) / (2.0 * h)
    return g


def grad_close(analytic, fd, rel=1e-3, absolute=1e-6):
    """Per-element check: |a - fd| <= absolute + rel * max(|a|, |fd|)."""
    a = np.asarray(analytic, dtype=np.float64)
    f = np.asarray(fd, dtype=np.float64)
    err = np.abs(a - f)
    bound = absolute + rel * np.maximum(np.abs(a), np.abs(f))
    return bool((err <= bound).all()), float((err - bound).max())


def oracle_ssim(a, b, window=8):
    """Scalar windowed SSIM: uniform window, biased (1/N) statistics,
    C1=(0.01)^2, C2=(0.03)^2 for unit dynamic range, channels averaged."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c1 = 0.01 ** 2
    c2 = 0.03 ** 2
    chan_vals = []
    for ch in range(a.shape[0]):
        ach, bch = a[ch], b[ch]
        h, w = ach.shape
        wh, ww = (window, window) if (h >= window and w >= window) else (h, w)
        vals = []
        for y in range(h - wh + 1):
            for x in range(w - ww + 1):
                pa = ach[y : y + wh, x : x + ww]
                pb = bch[y : y + wh, x : x + ww]
                mua, mub = pa.mean(), pb.mean()
                va = ((pa - mua) ** 2).mean()
                vb = ((pb - mub) ** 2).mean()
                cov = ((pa - mua) * (pb - mub)).mean()
                vals.append(
                    ((2 * mua * mub + c1) * (2 * cov + c2))
                    / ((mua ** 2 + mub ** 2 + c1) * (va + vb + c2))
                )
        chan_vals.append(np.mean(vals))
    return float(np.mean(chan_vals))
