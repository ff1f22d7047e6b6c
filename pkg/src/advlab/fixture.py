"""Desk-scale fixture: a procedurally generated 2-class 16x16 grayscale
dataset (centered Gaussian blobs vs diagonal stripe patterns) and a small
reference CNN trained on it. Everything derives deterministically from one
seed, so fixture files are byte-identical across runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .net import (
    F32,
    Flatten,
    LabeledBatch,
    Maxpool2,
    Network,
    Relu,
    Softmax,
    forward,
    init_conv2d,
    init_dense,
    train_sgd,
)

CLASS_NAMES = ("blob", "stripe")
IMAGE_SIZE = 16
TRAIN_COUNT = 512
TEST_COUNT = 128
TRAIN_EPOCHS = 30
TRAIN_LR = 0.05
TRAIN_BATCH = 32


def _blob_image(rng, size):
    cy, cx = rng.uniform(size / 2 - 2.5, size / 2 + 2.5, size=2)
    sigma = rng.uniform(2.0, 3.5)
    amp = rng.uniform(0.4, 0.7)
    yy, xx = np.mgrid[0:size, 0:size]
    img = amp * np.exp(-(((yy - cy) ** 2) + ((xx - cx) ** 2)) / (2 * sigma ** 2))
    return img


def _stripe_image(rng, size):
    freq = rng.uniform(0.55, 1.1)
    phase = rng.uniform(0, 2 * np.pi)
    amp = rng.uniform(0.35, 0.65)
    direction = rng.choice([-1.0, 1.0])
    yy, xx = np.mgrid[0:size, 0:size]
    img = 0.45 + amp / 2 * np.sin((yy + direction * xx) * freq + phase)
    return img


def make_dataset(rng, count, size=IMAGE_SIZE, noise=0.05, mix=(0.3, 0.9)):
    """Balanced LabeledBatch: even indices blob (class 0), odd stripe (1),
    shuffled with the supplied generator.

    Each image blends in a faint pattern of the opposite class (weight drawn
    from `mix`): the confounder keeps the classifier's decision margin small
    enough for budget-0.1 attacks to bite, while staying low-dimensional
    enough for the autoencoder defense to reconstruct tightly.
    """
    images = np.empty((count, 1, size, size), dtype=F32)
    labels = np.empty(count, dtype=np.int64)
    for i in range(count):
        label = i % 2
        alpha = rng.uniform(*mix)
        if label == 0:
            img = _blob_image(rng, size) + alpha * (_stripe_image(rng, size) - 0.45)
        else:
            img = _stripe_image(rng, size) + alpha * _blob_image(rng, size)
        img = img + rng.normal(0, noise, size=img.shape)
        images[i, 0] = np.clip(img, 0.0, 1.0)
        labels[i] = label
    order = rng.permutation(count)
    return LabeledBatch(images[order], labels[order])


def reference_cnn(rng, size=IMAGE_SIZE, classes=2):
    """conv(8, 3x3, same) -> relu -> maxpool2 -> flatten -> dense(32)
    -> relu -> dense(classes) -> softmax; the dense-relu output (layer 5)
    is the embedding."""
    flat = 8 * (size // 2) * (size // 2)
    layers = (
        init_conv2d(rng, 1, 8, 3, "same"),
        Relu(),
        Maxpool2(),
        Flatten(),
        init_dense(rng, flat, 32),
        Relu(),
        init_dense(rng, 32, classes),
        Softmax(),
    )
    return Network(layers, (1, size, size), class_count=classes, embedding_index=5)


def accuracy(net, batch):
    preds = forward(net, batch.inputs).argmax(axis=1)
    return float((preds == batch.labels).mean())


@dataclass(frozen=True)
class FixtureBundle:
    network: Network
    train: LabeledBatch
    test: LabeledBatch
    class_names: tuple
    test_accuracy: float


def generate_toy_fixture(seed):
    """Generate the dataset, train the reference CNN, and report held-out
    accuracy. The exported dataset is the held-out test split; the training
    split stays internal to the generator."""
    root = np.random.SeedSequence(seed)
    data_seed, init_seed, train_seed = root.spawn(3)
    data_rng = np.random.default_rng(data_seed)
    train = make_dataset(data_rng, TRAIN_COUNT)
    test = make_dataset(data_rng, TEST_COUNT)
    net = reference_cnn(np.random.default_rng(init_seed))
    trained = train_sgd(
        net,
        train,
        epochs=TRAIN_EPOCHS,
        lr=TRAIN_LR,
        batch_size=TRAIN_BATCH,
        seed=int(np.random.default_rng(train_seed).integers(2 ** 63)),
    )
    return FixtureBundle(trained, train, test, CLASS_NAMES, accuracy(trained, test))
