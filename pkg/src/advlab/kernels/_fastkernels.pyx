# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled conv2d / 2x2 maxpool kernels.

Drop-in replacements for the NumPy reference kernels: float32 forward,
float64 backward chain, float64 accumulators everywhere. Padding is
implicit (out-of-range taps read as zero) instead of materialized.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def conv2d_forward(x, w, b, pads):
    x = np.ascontiguousarray(x, dtype=np.float32)
    w = np.ascontiguousarray(w, dtype=np.float32)
    b = np.ascontiguousarray(b, dtype=np.float32)
    cdef Py_ssize_t pt = pads[0], pb = pads[1], pl = pads[2], pr = pads[3]
    cdef float[:, :, :, ::1] xv = x
    cdef float[:, :, :, ::1] wv = w
    cdef float[::1] bv = b
    cdef Py_ssize_t n = xv.shape[0], cin = xv.shape[1], h = xv.shape[2], wd = xv.shape[3]
    cdef Py_ssize_t cout = wv.shape[0], kh = wv.shape[2], kw = wv.shape[3]
    cdef Py_ssize_t ho = h + pt + pb - kh + 1
    cdef Py_ssize_t wo = wd + pl + pr - kw + 1
    out = np.empty((n, cout, ho, wo), dtype=np.float32)
    cdef float[:, :, :, ::1] ov = out
    cdef Py_ssize_t s, co, ci, oy, ox, i, j, yy, xx
    cdef double acc
    for s in range(n):
        for co in range(cout):
            for oy in range(ho):
                for ox in range(wo):
                    acc = bv[co]
                    for ci in range(cin):
                        for i in range(kh):
                            yy = oy + i - pt
                            if yy < 0 or yy >= h:
                                continue
                            for j in range(kw):
                                xx = ox + j - pl
                                if xx < 0 or xx >= wd:
                                    continue
                                acc += <double> xv[s, ci, yy, xx] * <double> wv[co, ci, i, j]
                    ov[s, co, oy, ox] = <float> acc
    return out


def conv2d_grad_input(gy, w, x_shape, pads):
    gy = np.ascontiguousarray(gy, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float32)
    cdef Py_ssize_t pt = pads[0], pl = pads[2]
    cdef double[:, :, :, ::1] gv = gy
    cdef float[:, :, :, ::1] wv = w
    cdef Py_ssize_t n = x_shape[0], cin = x_shape[1], h = x_shape[2], wd = x_shape[3]
    cdef Py_ssize_t cout = wv.shape[0], kh = wv.shape[2], kw = wv.shape[3]
    cdef Py_ssize_t ho = gv.shape[2], wo = gv.shape[3]
    gx = np.zeros((n, cin, h, wd), dtype=np.float64)
    cdef double[:, :, :, ::1] gxv = gx
    cdef Py_ssize_t s, co, ci, y, x_, i, j, oy, ox
    cdef double acc
    for s in range(n):
        for ci in range(cin):
            for y in range(h):
                for x_ in range(wd):
                    acc = 0.0
                    for co in range(cout):
                        for i in range(kh):
                            oy = y + pt - i
                            if oy < 0 or oy >= ho:
                                continue
                            for j in range(kw):
                                ox = x_ + pl - j
                                if ox < 0 or ox >= wo:
                                    continue
                                acc += gv[s, co, oy, ox] * <double> wv[co, ci, i, j]
                    gxv[s, ci, y, x_] = acc
    return gx


def conv2d_grad_weights(gy, x, w_shape, pads):
    gy = np.ascontiguousarray(gy, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float32)
    cdef Py_ssize_t pt = pads[0], pl = pads[2]
    cdef double[:, :, :, ::1] gv = gy
    cdef float[:, :, :, ::1] xv = x
    cdef Py_ssize_t cout = w_shape[0], cin = w_shape[1], kh = w_shape[2], kw = w_shape[3]
    cdef Py_ssize_t n = xv.shape[0], h = xv.shape[2], wd = xv.shape[3]
    cdef Py_ssize_t ho = gv.shape[2], wo = gv.shape[3]
    gw = np.zeros((cout, cin, kh, kw), dtype=np.float64)
    gb = np.zeros(cout, dtype=np.float64)
    cdef double[:, :, :, ::1] gwv = gw
    cdef double[::1] gbv = gb
    cdef Py_ssize_t s, co, ci, i, j, oy, ox, yy, xx
    cdef double acc, bacc
    for co in range(cout):
        for ci in range(cin):
            for i in range(kh):
                for j in range(kw):
                    acc = 0.0
                    for s in range(n):
                        for oy in range(ho):
                            yy = oy + i - pt
                            if yy < 0 or yy >= h:
                                continue
                            for ox in range(wo):
                                xx = ox + j - pl
                                if xx < 0 or xx >= wd:
                                    continue
                                acc += gv[s, co, oy, ox] * <double> xv[s, ci, yy, xx]
                    gwv[co, ci, i, j] = acc
    for co in range(cout):
        bacc = 0.0
        for s in range(n):
            for oy in range(ho):
                for ox in range(wo):
                    bacc += gv[s, co, oy, ox]
        gbv[co] = bacc
    return gw, gb


def maxpool2_forward(x):
    x = np.ascontiguousarray(x, dtype=np.float32)
    cdef float[:, :, :, ::1] xv = x
    cdef Py_ssize_t n = xv.shape[0], c = xv.shape[1], h = xv.shape[2], wd = xv.shape[3]
    cdef Py_ssize_t h2 = h // 2, w2 = wd // 2
    out = np.empty((n, c, h2, w2), dtype=np.float32)
    idx = np.empty((n, c, h2, w2), dtype=np.uint8)
    cdef float[:, :, :, ::1] ov = out
    cdef unsigned char[:, :, :, ::1] iv = idx
    cdef Py_ssize_t s, ci, y, x_, k, ky, kx
    cdef float best, v
    cdef unsigned char bi
    for s in range(n):
        for ci in range(c):
            for y in range(h2):
                for x_ in range(w2):
                    best = xv[s, ci, 2 * y, 2 * x_]
                    bi = 0
                    for k in range(1, 4):
                        ky = k >> 1
                        kx = k & 1
                        v = xv[s, ci, 2 * y + ky, 2 * x_ + kx]
                        if v > best:
                            best = v
                            bi = <unsigned char> k
                    ov[s, ci, y, x_] = best
                    iv[s, ci, y, x_] = bi
    return out, idx


def maxpool2_backward(gy, idx, x_shape):
    gy = np.ascontiguousarray(gy, dtype=np.float64)
    cdef double[:, :, :, ::1] gv = gy
    cdef unsigned char[:, :, :, ::1] iv = np.ascontiguousarray(idx, dtype=np.uint8)
    cdef Py_ssize_t n = x_shape[0], c = x_shape[1], h = x_shape[2], wd = x_shape[3]
    cdef Py_ssize_t h2 = h // 2, w2 = wd // 2
    gx = np.zeros((n, c, h, wd), dtype=np.float64)
    cdef double[:, :, :, ::1] gxv = gx
    cdef Py_ssize_t s, ci, y, x_
    cdef unsigned char k
    for s in range(n):
        for ci in range(c):
            for y in range(h2):
                for x_ in range(w2):
                    k = iv[s, ci, y, x_]
                    gxv[s, ci, 2 * y + (k >> 1), 2 * x_ + (k & 1)] = gv[s, ci, y, x_]
    return gx
