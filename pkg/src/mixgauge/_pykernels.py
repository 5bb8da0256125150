"""Pure numpy implementation of the polygon cell-classification kernels.

This is the fallback used when the compiled ``_ckernels`` extension is not
available.  Semantics are identical to the compiled version: the sign of
every orientation test is exact, so both backends produce the same states
and edge lists bit for bit.

Cell states: 0 = outside, 1 = inside, 2 = straddling.

Children of a parent cell ``(i, j)`` are emitted in lexicographic index
order ``(2i, 2j), (2i, 2j+1), (2i+1, 2j), (2i+1, 2j+1)``.
"""
import numpy as np

from .predicates import CCW_ERRBOUND, orient_exact

OUTSIDE, INSIDE, STRADDLE = 0, 1, 2

# pairs evaluated per numpy batch in the point-in-polygon sweep
_CHUNK = 1 << 20


def _orient_sign(ax, ay, bx, by, cx, cy):
    left = (bx - ax) * (cy - ay)
    right = (by - ay) * (cx - ax)
    det = left - right
    err = CCW_ERRBOUND * (np.abs(left) + np.abs(right))
    sign = np.where(det > err, 1, np.where(-det > err, -1, 0)).astype(np.int8)
    amb = np.flatnonzero((np.abs(det) <= err).ravel())
    if amb.size:
        flat = sign.reshape(-1)
        args = [np.broadcast_to(v, sign.shape).reshape(-1) for v in (ax, ay, bx, by, cx, cy)]
        for k in amb:
            flat[k] = orient_exact(*(float(a[k]) for a in args))
    return sign


def _hits(ax, ay, bx, by, x0, y0, x1, y1):
    """Vectorised closed-segment / open-box intersection test."""
    sep = (
        (np.maximum(ax, bx) <= x0)
        | (np.minimum(ax, bx) >= x1)
        | (np.maximum(ay, by) <= y0)
        | (np.minimum(ay, by) >= y1)
    )
    out = np.zeros(np.shape(sep), dtype=bool)
    idx = np.flatnonzero(~sep)
    if idx.size == 0:
        return out

    def take(v):
        return np.broadcast_to(v, sep.shape).reshape(-1)[idx]

    ax, ay, bx, by = take(ax), take(ay), take(bx), take(by)
    x0, y0, x1, y1 = take(x0), take(y0), take(x1), take(y1)
    pos = np.zeros(idx.size, dtype=bool)
    neg = np.zeros(idx.size, dtype=bool)
    for cx, cy in ((x0, y0), (x1, y0), (x1, y1), (x0, y1)):
        s = _orient_sign(ax, ay, bx, by, cx, cy)
        pos |= s > 0
        neg |= s < 0
    # a degenerate segment that passed the slab tests is a point inside the box
    out.reshape(-1)[idx] = (pos & neg) | ((ax == bx) & (ay == by))
    return out


def _edges(vx, vy):
    return vx, vy, np.roll(vx, -1), np.roll(vy, -1)


def points_in_polygon(vx, vy, px, py):
    """Crossing-number test for many points; exact off the boundary."""
    ax, ay, bx, by = _edges(vx, vy)
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    out = np.zeros(px.size, dtype=bool)
    rows = max(1, _CHUNK // max(1, ax.size))
    for s in range(0, px.size, rows):
        qx = px[s:s + rows, None]
        qy = py[s:s + rows, None]
        cond = (ay[None, :] > qy) != (by[None, :] > qy)
        r, c = np.nonzero(cond)
        if r.size == 0:
            continue
        sgn = _orient_sign(ax[c], ay[c], bx[c], by[c], qx[r, 0], qy[r, 0])
        cross = (sgn > 0) == (by[c] > ay[c])
        parity = np.bincount(r[cross], minlength=qx.shape[0]) & 1
        out[s:s + rows] = parity.astype(bool)
    return out


def box_edges(vx, vy, x0, y0, x1, y1):
    """Indices of the polygon edges meeting the open box, in edge order."""
    ax, ay, bx, by = _edges(vx, vy)
    return np.flatnonzero(_hits(ax, ay, bx, by, x0, y0, x1, y1)).astype(np.int64)


def classify_boxes(vx, vy, x0, y0, x1, y1):
    """Classify boxes against a polygon using every edge (no culling)."""
    vx = np.asarray(vx, dtype=np.float64)
    vy = np.asarray(vy, dtype=np.float64)
    x0, y0, x1, y1 = (np.atleast_1d(np.asarray(v, dtype=np.float64)) for v in (x0, y0, x1, y1))
    ax, ay, bx, by = _edges(vx, vy)
    states = np.empty(x0.size, dtype=np.int8)
    rows = max(1, _CHUNK // max(1, ax.size))
    for s in range(0, x0.size, rows):
        sl = slice(s, s + rows)
        hit = _hits(ax[None, :], ay[None, :], bx[None, :], by[None, :],
                    x0[sl, None], y0[sl, None], x1[sl, None], y1[sl, None])
        states[sl] = np.where(hit.any(axis=1), STRADDLE, OUTSIDE)
    free = np.flatnonzero(states != STRADDLE)
    if free.size:
        cx = 0.5 * (x0[free] + x1[free])
        cy = 0.5 * (y0[free] + y1[free])
        states[free] = np.where(points_in_polygon(vx, vy, cx, cy), INSIDE, OUTSIDE)
    return states


def expand_level(vx, vy, ox, oy, cs, pix, piy, pptr, pidx):
    """Classify the four children of each straddling parent.

    Parameters
    ----------
    vx, vy : polygon vertices (edge ``e`` joins vertex ``e`` and ``e+1``).
    ox, oy, cs : root origin and the side of a child cell.
    pix, piy : integer indices of the parents.
    pptr, pidx : CSR lists of the edges meeting each parent's open box.

    Returns
    -------
    states : int8 array of length ``4 * len(pix)``.
    cptr, cidx : CSR edge lists of the straddling children, in child order.
    """
    vx = np.asarray(vx, dtype=np.float64)
    vy = np.asarray(vy, dtype=np.float64)
    pix = np.asarray(pix, dtype=np.int64)
    piy = np.asarray(piy, dtype=np.int64)
    pptr = np.asarray(pptr, dtype=np.int64)
    pidx = np.asarray(pidx, dtype=np.int64)
    npar = pix.size
    ne = vx.size
    owner = np.repeat(np.arange(npar, dtype=np.int64), np.diff(pptr))
    e = pidx
    e1 = (e + 1) % ne
    ax, ay, bx, by = vx[e], vy[e], vx[e1], vy[e1]

    hit = np.empty((e.size, 4), dtype=bool)
    cx0 = np.empty((npar, 4))
    cy0 = np.empty((npar, 4))
    cx1 = np.empty((npar, 4))
    cy1 = np.empty((npar, 4))
    for c in range(4):
        ix = 2 * pix + (c >> 1)
        iy = 2 * piy + (c & 1)
        cx0[:, c] = ox + cs * ix.astype(np.float64)
        cx1[:, c] = ox + cs * (ix + 1).astype(np.float64)
        cy0[:, c] = oy + cs * iy.astype(np.float64)
        cy1[:, c] = oy + cs * (iy + 1).astype(np.float64)
        hit[:, c] = _hits(ax, ay, bx, by, cx0[owner, c], cy0[owner, c], cx1[owner, c], cy1[owner, c])

    cid = (owner[:, None] * 4 + np.arange(4)[None, :])[hit]
    edge = np.broadcast_to(e[:, None], hit.shape)[hit]
    order = np.argsort(cid, kind="stable")
    cid = cid[order]
    cidx = edge[order].astype(np.int64)
    counts = np.bincount(cid, minlength=4 * npar)

    states = np.full(4 * npar, STRADDLE, dtype=np.int8)
    free = np.flatnonzero(counts == 0)
    if free.size:
        fx0, fx1 = cx0.reshape(-1)[free], cx1.reshape(-1)[free]
        fy0, fy1 = cy0.reshape(-1)[free], cy1.reshape(-1)[free]
        inside = points_in_polygon(vx, vy, 0.5 * (fx0 + fx1), 0.5 * (fy0 + fy1))
        states[free] = np.where(inside, INSIDE, OUTSIDE)
    strad_counts = counts[counts > 0]
    cptr = np.zeros(strad_counts.size + 1, dtype=np.int64)
    np.cumsum(strad_counts, out=cptr[1:])
    return states, cptr, cidx
