"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
implementation.  Set ``MIXGAUGE_PURE_PYTHON=1`` to force the fallback.
"""
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

OUTSIDE, INSIDE, STRADDLE = _pykernels.OUTSIDE, _pykernels.INSIDE, _pykernels.STRADDLE

try:
    if os.environ.get("MIXGAUGE_PURE_PYTHON"):
        raise ImportError("pure python backend forced")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"


def get_backend(name=None):
    """Return the kernel module for ``name`` ('cython', 'python' or None for default)."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def expand_level(vx, vy, ox, oy, cs, pix, piy, pptr, pidx, threads=1, backend=None):
    """Run ``expand_level`` over contiguous parent chunks, merged in order.

    The merge is positional, so the output does not depend on ``threads``.
    """
    impl = get_backend(backend)
    npar = len(pix)
    threads = max(1, int(threads))
    if threads == 1 or npar < 64:
        return impl.expand_level(vx, vy, ox, oy, cs, pix, piy, pptr, pidx)
    bounds = np.linspace(0, npar, threads + 1).astype(np.int64)

    def run(k):
        a, b = bounds[k], bounds[k + 1]
        sub_ptr = pptr[a:b + 1] - pptr[a]
        sub_idx = pidx[pptr[a]:pptr[b]]
        return impl.expand_level(vx, vy, ox, oy, cs, pix[a:b], piy[a:b], sub_ptr, sub_idx)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(run, range(threads)))
    states = np.concatenate([p[0] for p in parts])
    cidx = np.concatenate([p[2] for p in parts])
    ptrs = [np.zeros(1, dtype=np.int64)]
    offset = 0
    for _, cptr, ci in parts:
        ptrs.append(cptr[1:] + offset)
        offset += ci.size
    return states, np.concatenate(ptrs), cidx


def classify_boxes(vx, vy, x0, y0, x1, y1, backend=None):
    return get_backend(backend).classify_boxes(vx, vy, x0, y0, x1, y1)


def box_edges(vx, vy, x0, y0, x1, y1, backend=None):
    return get_backend(backend).box_edges(vx, vy, x0, y0, x1, y1)


def points_in_polygon(vx, vy, px, py, backend=None):
    return get_backend(backend).points_in_polygon(vx, vy, px, py)
