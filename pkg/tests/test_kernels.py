"""Compiled and NumPy kernel backends agree on every kernel contract.

Backends share semantics but not accumulation order, so numeric agreement
is to float32 round-off, not bit-identity; index outputs (pool routing)
must match exactly.
"""

import numpy as np
import pytest

from advlab.kernels import reference

fast = pytest.importorskip(
    "advlab.kernels._fastkernels", reason="compiled kernels not built"
)


def rand(shape, seed, scale=1.0):
    return (np.random.default_rng(seed).standard_normal(shape) * scale).astype(np.float32)


PADS = {"valid": (0, 0, 0, 0), "same": (1, 1, 1, 1)}


class TestConv2d:
    @pytest.mark.parametrize("pads", PADS.values(), ids=PADS.keys())
    def test_forward_agreement(self, pads):
        x = rand((3, 2, 8, 8), 0)
        w = rand((4, 2, 3, 3), 1)
        b = rand((4,), 2)
        a = reference.conv2d_forward(x, w, b, pads)
        c = fast.conv2d_forward(x, w, b, pads)
        assert a.shape == c.shape
        assert np.abs(a - c).max() <= 1e-5

    @pytest.mark.parametrize("pads", PADS.values(), ids=PADS.keys())
    def test_grad_input_agreement(self, pads):
        x_shape = (2, 2, 8, 8)
        w = rand((3, 2, 3, 3), 3)
        ho = 8 if pads[0] else 6
        gy = rand((2, 3, ho, ho), 4).astype(np.float64)
        a = reference.conv2d_grad_input(gy, w, x_shape, pads)
        c = fast.conv2d_grad_input(gy, w, x_shape, pads)
        assert np.abs(a - c).max() <= 1e-10

    @pytest.mark.parametrize("pads", PADS.values(), ids=PADS.keys())
    def test_grad_weights_agreement(self, pads):
        x = rand((2, 2, 8, 8), 5)
        w_shape = (3, 2, 3, 3)
        ho = 8 if pads[0] else 6
        gy = rand((2, 3, ho, ho), 6).astype(np.float64)
        aw, ab = reference.conv2d_grad_weights(gy, x, w_shape, pads)
        cw, cb = fast.conv2d_grad_weights(gy, x, w_shape, pads)
        assert np.abs(aw - cw).max() <= 1e-10
        assert np.abs(ab - cb).max() <= 1e-10


class TestMaxpool2:
    def test_forward_agreement(self):
        x = rand((3, 2, 6, 8), 7)
        ya, ia = reference.maxpool2_forward(x)
        yc, ic = fast.maxpool2_forward(x)
        assert np.array_equal(ya, yc)
        assert np.array_equal(ia, ic)

    def test_tie_routing_matches(self):
        # constant windows: both backends must route to the first element
        x = np.ones((1, 1, 4, 4), dtype=np.float32)
        _, ia = reference.maxpool2_forward(x)
        _, ic = fast.maxpool2_forward(x)
        assert np.array_equal(ia, ic)
        assert np.all(ia == 0)

    def test_backward_agreement(self):
        x = rand((2, 3, 8, 6), 8)
        _, idx = reference.maxpool2_forward(x)
        gy = rand((2, 3, 4, 3), 9).astype(np.float64)
        a = reference.maxpool2_backward(gy, idx, x.shape)
        c = fast.maxpool2_backward(gy, idx, x.shape)
        assert np.array_equal(a, c)
