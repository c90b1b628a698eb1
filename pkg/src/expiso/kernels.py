"""Backend selection for the grid sweeps.

The compiled extension ``expiso._kernels`` is used when it was built; the
numpy module ``expiso._kernels_py`` is the fallback.  Setting
``EXPISO_PURE_PYTHON=1`` forces the fallback.
"""
import math
import os

import numpy as np

from . import _kernels_py

if os.environ.get("EXPISO_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "numpy"


def _three_axis_view(arr, axis):
    shape = arr.shape
    outer = math.prod(shape[:axis])
    inner = math.prod(shape[axis + 1:])
    return arr.reshape(outer, shape[axis], inner)


def axis_pass(dist, axis, forward, boundary_source, cap, impl=None):
    """In-place sweep ``d[i] = min(d[i], d[i -/+ 1] + 1)`` along ``axis``, saturating at ``cap``."""
    impl = impl or _impl
    if not dist.flags.c_contiguous:
        raise ValueError("distance buffer must be C-contiguous")
    impl.axis_pass(_three_axis_view(dist, axis), bool(forward), bool(boundary_source), int(cap))


def mass_histogram(dist, weights, nbins, impl=None):
    """``hist[v] = sum of prod_k weights[k][i_k]`` over cells holding value ``v < nbins``."""
    impl = impl or _impl
    if dist.dtype != np.uint8:  # the compiled histogram reads byte buffers only
        impl = _kernels_py
    ws = [np.ascontiguousarray(w, dtype=np.float64) for w in weights]
    if dist.size == 0:
        return np.zeros(nbins)
    if dist.ndim == 2:
        return impl.mass_histogram_2d(dist, ws[0], ws[1], int(nbins))
    if dist.ndim == 3:
        return impl.mass_histogram_3d(dist, ws[0], ws[1], ws[2], int(nbins))
    raise ValueError("only 2- and 3-dimensional grids are supported")


def diagonal_counts(occ, impl=None):
    impl = impl or _impl
    return impl.diagonal_counts(np.ascontiguousarray(occ, dtype=np.uint8))
