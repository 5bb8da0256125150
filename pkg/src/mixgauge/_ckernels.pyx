# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled polygon cell-classification kernels.

Mirror of ``_pykernels``; see that module for the contract.  Orientation
signs that the floating-point filter cannot decide are resolved by the
shared exact predicate, so both backends agree bit for bit.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

from .predicates import orient_exact

cnp.import_array()

cdef double CCW_ERRBOUND = 3.3306690738754716e-16

DEF OUTSIDE = 0
DEF INSIDE = 1
DEF STRADDLE = 2


cdef int _orient(double ax, double ay, double bx, double by, double cx, double cy) noexcept nogil:
    cdef double left = (bx - ax) * (cy - ay)
    cdef double right = (by - ay) * (cx - ax)
    cdef double det = left - right
    cdef double err = CCW_ERRBOUND * (fabs(left) + fabs(right))
    if det > err:
        return 1
    if -det > err:
        return -1
    with gil:
        return orient_exact(ax, ay, bx, by, cx, cy)


cdef inline double _max(double a, double b) noexcept nogil:
    return a if a > b else b


cdef inline double _min(double a, double b) noexcept nogil:
    return a if a < b else b


cdef bint _hits(double ax, double ay, double bx, double by,
                double x0, double y0, double x1, double y1) noexcept nogil:
    if _max(ax, bx) <= x0 or _min(ax, bx) >= x1:
        return False
    if _max(ay, by) <= y0 or _min(ay, by) >= y1:
        return False
    if ax == bx and ay == by:
        return True
    cdef bint pos = False
    cdef bint neg = False
    cdef int s
    s = _orient(ax, ay, bx, by, x0, y0)
    pos |= s > 0
    neg |= s < 0
    s = _orient(ax, ay, bx, by, x1, y0)
    pos |= s > 0
    neg |= s < 0
    s = _orient(ax, ay, bx, by, x1, y1)
    pos |= s > 0
    neg |= s < 0
    s = _orient(ax, ay, bx, by, x0, y1)
    pos |= s > 0
    neg |= s < 0
    return pos and neg


cdef bint _pip(double px, double py, const double[::1] vx, const double[::1] vy) noexcept nogil:
    cdef Py_ssize_t m = vx.shape[0]
    cdef Py_ssize_t i, j
    cdef bint inside = False
    cdef double ax, ay, bx, by
    cdef int s
    for i in range(m):
        j = i + 1
        if j == m:
            j = 0
        ax = vx[i]
        ay = vy[i]
        bx = vx[j]
        by = vy[j]
        if (ay > py) != (by > py):
            s = _orient(ax, ay, bx, by, px, py)
            if (s > 0) == (by > ay):
                inside = not inside
    return inside


def points_in_polygon(vx, vy, px, py):
    cdef const double[::1] cvx = np.ascontiguousarray(vx, dtype=np.float64)
    cdef const double[::1] cvy = np.ascontiguousarray(vy, dtype=np.float64)
    cdef const double[::1] qx = np.ascontiguousarray(np.atleast_1d(px), dtype=np.float64)
    cdef const double[::1] qy = np.ascontiguousarray(np.atleast_1d(py), dtype=np.float64)
    out = np.empty(qx.shape[0], dtype=bool)
    cdef cnp.npy_bool[::1] o = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(qx.shape[0]):
            o[k] = _pip(qx[k], qy[k], cvx, cvy)
    return out


def box_edges(vx, vy, double x0, double y0, double x1, double y1):
    cdef const double[::1] cvx = np.ascontiguousarray(vx, dtype=np.float64)
    cdef const double[::1] cvy = np.ascontiguousarray(vy, dtype=np.float64)
    cdef Py_ssize_t m = cvx.shape[0]
    cdef Py_ssize_t e, f, n = 0
    out = np.empty(m, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    with nogil:
        for e in range(m):
            f = e + 1 if e + 1 < m else 0
            if _hits(cvx[e], cvy[e], cvx[f], cvy[f], x0, y0, x1, y1):
                o[n] = e
                n += 1
    return out[:n].copy()


def classify_boxes(vx, vy, x0, y0, x1, y1):
    cdef const double[::1] cvx = np.ascontiguousarray(vx, dtype=np.float64)
    cdef const double[::1] cvy = np.ascontiguousarray(vy, dtype=np.float64)
    cdef const double[::1] bx0 = np.ascontiguousarray(np.atleast_1d(x0), dtype=np.float64)
    cdef const double[::1] by0 = np.ascontiguousarray(np.atleast_1d(y0), dtype=np.float64)
    cdef const double[::1] bx1 = np.ascontiguousarray(np.atleast_1d(x1), dtype=np.float64)
    cdef const double[::1] by1 = np.ascontiguousarray(np.atleast_1d(y1), dtype=np.float64)
    cdef Py_ssize_t nb = bx0.shape[0]
    cdef Py_ssize_t m = cvx.shape[0]
    states = np.empty(nb, dtype=np.int8)
    cdef cnp.int8_t[::1] st = states
    cdef Py_ssize_t k, e, f
    cdef bint hit
    with nogil:
        for k in range(nb):
            hit = False
            for e in range(m):
                f = e + 1 if e + 1 < m else 0
                if _hits(cvx[e], cvy[e], cvx[f], cvy[f], bx0[k], by0[k], bx1[k], by1[k]):
                    hit = True
                    break
            if hit:
                st[k] = STRADDLE
            elif _pip(0.5 * (bx0[k] + bx1[k]), 0.5 * (by0[k] + by1[k]), cvx, cvy):
                st[k] = INSIDE
            else:
                st[k] = OUTSIDE
    return states


def expand_level(vx, vy, double ox, double oy, double cs, pix, piy, pptr, pidx):
    cdef const double[::1] cvx = np.ascontiguousarray(vx, dtype=np.float64)
    cdef const double[::1] cvy = np.ascontiguousarray(vy, dtype=np.float64)
    cdef const cnp.int64_t[::1] px = np.ascontiguousarray(pix, dtype=np.int64)
    cdef const cnp.int64_t[::1] py = np.ascontiguousarray(piy, dtype=np.int64)
    cdef const cnp.int64_t[::1] ptr = np.ascontiguousarray(pptr, dtype=np.int64)
    cdef const cnp.int64_t[::1] idx = np.ascontiguousarray(pidx, dtype=np.int64)
    cdef Py_ssize_t npar = px.shape[0]
    cdef Py_ssize_t m = cvx.shape[0]

    states = np.empty(4 * npar, dtype=np.int8)
    cptr = np.empty(4 * npar + 1, dtype=np.int64)
    cidx = np.empty(4 * idx.shape[0], dtype=np.int64)
    cdef cnp.int8_t[::1] st = states
    cdef cnp.int64_t[::1] optr = cptr
    cdef cnp.int64_t[::1] oidx = cidx

    cdef Py_ssize_t p, c, k, e, f, start
    cdef Py_ssize_t nidx = 0, nstrad = 0
    cdef cnp.int64_t ix, iy
    cdef double x0, y0, x1, y1
    optr[0] = 0
    with nogil:
        for p in range(npar):
            for c in range(4):
                ix = 2 * px[p] + (c >> 1)
                iy = 2 * py[p] + (c & 1)
                x0 = ox + cs * <double>ix
                x1 = ox + cs * <double>(ix + 1)
                y0 = oy + cs * <double>iy
                y1 = oy + cs * <double>(iy + 1)
                start = nidx
                for k in range(ptr[p], ptr[p + 1]):
                    e = idx[k]
                    f = e + 1 if e + 1 < m else 0
                    if _hits(cvx[e], cvy[e], cvx[f], cvy[f], x0, y0, x1, y1):
                        oidx[nidx] = e
                        nidx += 1
                if nidx > start:
                    st[4 * p + c] = STRADDLE
                    nstrad += 1
                    optr[nstrad] = nidx
                elif _pip(0.5 * (x0 + x1), 0.5 * (y0 + y1), cvx, cvy):
                    st[4 * p + c] = INSIDE
                else:
                    st[4 * p + c] = OUTSIDE
    return states, cptr[:nstrad + 1].copy(), cidx[:nidx].copy()
