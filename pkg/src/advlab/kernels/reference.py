"""NumPy fallback kernels for conv2d and 2x2 max pooling.

Forward passes take float32 arrays and return float32; backward passes run
in float64 (the backward chain is carried in 64-bit and cast to 32-bit only
at API boundaries). All reductions accumulate in float64.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

F32 = np.float32

BACKEND = "python"


def _im2col(x, kh, kw, pads):
    """Return float64 patch matrix of shape (n, ho, wo, cin*kh*kw)."""
    pt, pb, pl, pr = pads
    xp = np.pad(x, ((0, 0), (0, 0), (pt, pb), (pl, pr))).astype(np.float64)
    win = sliding_window_view(xp, (kh, kw), axis=(2, 3))  # (n, cin, ho, wo, kh, kw)
    n, cin, ho, wo = win.shape[:4]
    return win.transpose(0, 2, 3, 1, 4, 5).reshape(n, ho, wo, cin * kh * kw)


def conv2d_forward(x, w, b, pads):
    """Stride-1 2D convolution; x (n,cin,h,w), w (cout,cin,kh,kw), b (cout,)."""
    cout, cin, kh, kw = w.shape
    cols = _im2col(x, kh, kw, pads)
    wmat = w.reshape(cout, -1).astype(np.float64)
    y = cols @ wmat.T + b.astype(np.float64)
    return y.transpose(0, 3, 1, 2).astype(F32)


def conv2d_grad_input(gy, w, x_shape, pads):
    """Gradient wrt the convolution input; gy (n,cout,ho,wo) float64."""
    cout, cin, kh, kw = w.shape
    n, _, h, wd = x_shape
    pt, pb, pl, pr = pads
    ho, wo = gy.shape[2], gy.shape[3]
    wmat = w.reshape(cout, -1).astype(np.float64)
    gcols = gy.transpose(0, 2, 3, 1) @ wmat  # (n, ho, wo, cin*kh*kw)
    g6 = gcols.reshape(n, ho, wo, cin, kh, kw)
    gxp = np.zeros((n, cin, h + pt + pb, wd + pl + pr))
    for i in range(kh):
        for j in range(kw):
            gxp[:, :, i : i + ho, j : j + wo] += g6[:, :, :, :, i, j].transpose(0, 3, 1, 2)
    return gxp[:, :, pt : pt + h, pl : pl + wd]


def conv2d_grad_weights(gy, x, w_shape, pads):
    """Gradients wrt convolution weights and bias; gy (n,cout,ho,wo) float64."""
    cout, cin, kh, kw = w_shape
    cols = _im2col(x, kh, kw, pads)
    gmat = gy.transpose(0, 2, 3, 1).reshape(-1, cout)
    gw = gmat.T @ cols.reshape(gmat.shape[0], -1)
    gb = gy.sum(axis=(0, 2, 3))
    return gw.reshape(w_shape), gb


def maxpool2_forward(x):
    """2x2 stride-2 max pooling; returns (y, idx) with idx in {0..3} marking
    the first maximal element of each window in row-major order."""
    n, c, h, w = x.shape
    win = (
        x.reshape(n, c, h // 2, 2, w // 2, 2)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, h // 2, w // 2, 4)
    )
    idx = win.argmax(axis=-1).astype(np.uint8)
    y = np.take_along_axis(win, idx[..., None].astype(np.intp), axis=-1)[..., 0]
    return np.ascontiguousarray(y), idx


def maxpool2_backward(gy, idx, x_shape):
    """Route gy (float64) back to the argmax position of each 2x2 window."""
    n, c, h, w = x_shape
    g4 = np.zeros((n, c, h // 2, w // 2, 4))
    np.put_along_axis(g4, idx[..., None].astype(np.intp), gy[..., None], axis=-1)
    return np.ascontiguousarray(
        g4.reshape(n, c, h // 2, w // 2, 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, h, w)
    )
