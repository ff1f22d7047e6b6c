"""Kernel backend selection.

The compiled Cython kernels are used when the extension was built; otherwise
the NumPy reference implementation takes over. `ADVLAB_KERNELS` forces the
choice: "cython" (error if missing), "python", or "auto" (default).

Both backends implement the same contracts; results agree to float32
round-off but are not guaranteed bit-identical across backends (accumulation
order differs). Within one backend every kernel is deterministic.
"""

import os

from . import reference

_requested = os.environ.get("ADVLAB_KERNELS", "auto")
if _requested not in ("auto", "cython", "python"):
    raise RuntimeError(f"ADVLAB_KERNELS must be auto|cython|python, got {_requested!r}")

_impl = None
if _requested in ("auto", "cython"):
    try:
        from . import _fastkernels as _impl
    except ImportError:
        if _requested == "cython":
            raise
        _impl = None
if _impl is None:
    _impl = reference

BACKEND = _impl.BACKEND
conv2d_forward = _impl.conv2d_forward
conv2d_grad_input = _impl.conv2d_grad_input
conv2d_grad_weights = _impl.conv2d_grad_weights
maxpool2_forward = _impl.maxpool2_forward
maxpool2_backward = _impl.maxpool2_backward
