"""Seeded network builders shared across test modules."""

import numpy as np

from advlab import net as N


def make_mlp(seed=0, in_dim=4, hidden=5, classes=3, activation="relu"):
    rng = np.random.default_rng(seed)
    act = N.Relu() if activation == "relu" else N.Sigmoid()
    layers = (
        N.init_dense(rng, in_dim, hidden),
        act,
        N.init_dense(rng, hidden, classes),
        N.Softmax(),
    )
    return N.Network(layers, (in_dim,), class_count=classes, embedding_index=1)


def make_cnn(seed=0, size=8, channels=1, classes=2, padding="valid"):
    rng = np.random.default_rng(seed)
    conv = N.init_conv2d(rng, channels, 2, 3, padding)
    c, h, w = conv.out_shape((channels, size, size))
    if h % 2:
        raise AssertionError("pick a size giving even conv output")
    flat = c * (h // 2) * (w // 2)
    layers = (
        conv,
        N.Relu(),
        N.Maxpool2(),
        N.Flatten(),
        N.init_dense(rng, flat, 6),
        N.Relu(),
        N.init_dense(rng, 6, classes),
        N.Softmax(),
    )
    return N.Network(layers, (channels, size, size), class_count=classes, embedding_index=5)


def random_batch(net, n, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, size=(n, *net.input_shape)).astype(np.float32)
    y = rng.integers(0, net.class_count, size=n)
    return N.LabeledBatch(x, y)
