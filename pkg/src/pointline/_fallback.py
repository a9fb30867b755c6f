"""NumPy implementations of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable. Every
distance is evaluated as ``y[a] - y[b] - t[b] * (x[a] - x[b])`` in exactly
that operation order so that both backends produce bit-identical floats.
"""
import math

import numpy as np

_BLOCK = 256


def min_pair_brute(x, y, t, num_threads=1):
    """Exact minimum over ordered pairs ``a != b``; ties go to the smallest (a, b)."""
    n = x.shape[0]
    best = math.inf
    wa = wb = -1
    for start in range(0, n, _BLOCK):
        stop = min(n, start + _BLOCK)
        xa = x[start:stop, None]
        ya = y[start:stop, None]
        d = np.abs(ya - y[None, :] - t[None, :] * (xa - x[None, :]))
        rows = np.arange(stop - start)
        d[rows, rows + start] = np.inf
        k = int(np.argmin(d))
        r, c = divmod(k, n)
        m = float(d[r, c])
        if m < best:
            best, wa, wb = m, start + r, c
    return best, wa, wb


def _pair_values(x, y, t, ia, ib):
    return np.abs(y[ia] - y[ib] - t[ib] * (x[ia] - x[ib]))


def _better(m, a, b, best, wa, wb):
    return m < best or (m == best and (a, b) < (wa, wb))


class _Grid:
    """Uniform bucket grid over the bounding box, stored in CSR form."""

    def __init__(self, x, y, cell):
        n = x.shape[0]
        self.xmin, self.ymin = float(x.min()), float(y.min())
        sx = float(x.max()) - self.xmin
        sy = float(y.max()) - self.ymin
        cell = grid_cell(n, sx, sy, cell)
        self.cell = cell
        self.ncols = max(1, int(math.floor(sx / cell)) + 1)
        self.nrows = max(1, int(math.floor(sy / cell)) + 1)
        col = np.minimum(((x - self.xmin) / cell).astype(np.int64), self.ncols - 1)
        row = np.minimum(((y - self.ymin) / cell).astype(np.int64), self.nrows - 1)
        cid = col * self.nrows + row
        self.order = np.argsort(cid, kind="stable")
        counts = np.bincount(cid, minlength=self.ncols * self.nrows)
        self.start = np.concatenate(([0], np.cumsum(counts)))


def grid_cell(n, sx, sy, cell):
    """Clamp the requested cell size so the grid has O(n) cells."""
    if cell is None or not cell > 0:
        area = max(sx, 1e-9) * max(sy, 1e-9)
        cell = math.sqrt(area / max(n, 1))
    cell = max(cell, 1e-12)
    limit = 16 * n + 1024
    while (math.floor(sx / cell) + 1) * (math.floor(sy / cell) + 1) > limit:
        cell *= 2.0
    return cell


# absolute slack on the candidate band; covers rounding in cell assignment
BAND_MARGIN = 1e-9


def min_pair_grid(x, y, t, cell=None):
    n = x.shape[0]
    if n < 64:
        return min_pair_brute(x, y, t)
    g = _Grid(x, y, cell)

    # finite starting bound from neighbours in bucket order
    ia = g.order[:-1]
    ib = g.order[1:]
    ia, ib = np.concatenate((ia, ib)), np.concatenate((ib, ia))
    vals = _pair_values(x, y, t, ia, ib)
    m = vals.min()
    sel = np.flatnonzero(vals == m)
    pairs = sorted(zip(ia[sel].tolist(), ib[sel].tolist()))
    best = float(m)
    wa, wb = pairs[0]

    xl = g.xmin + np.arange(g.ncols) * g.cell
    xr = xl + g.cell
    base = np.arange(g.ncols) * g.nrows
    for b in range(n):
        xb, yb, tb = x[b], y[b], t[b]
        yl = yb + tb * (xl - xb)
        yr = yb + tb * (xr - xb)
        lo = np.minimum(yl, yr) - best - BAND_MARGIN
        hi = np.maximum(yl, yr) + best + BAND_MARGIN
        r0 = np.floor((lo - g.ymin) / g.cell)
        r1 = np.floor((hi - g.ymin) / g.cell)
        ok = (r1 >= 0) & (r0 <= g.nrows - 1)
        if not ok.any():
            continue
        r0 = np.clip(r0[ok], 0, g.nrows - 1).astype(np.int64)
        r1 = np.clip(r1[ok], 0, g.nrows - 1).astype(np.int64)
        c0 = g.start[base[ok] + r0]
        c1 = g.start[base[ok] + r1 + 1]
        cand = np.concatenate([g.order[s:e] for s, e in zip(c0.tolist(), c1.tolist())])
        cand = cand[cand != b]
        if cand.size == 0:
            continue
        d = np.abs(y[cand] - yb - tb * (x[cand] - xb))
        m = float(d.min())
        if m <= best:
            a = int(cand[d == m].min())
            if _better(m, a, b, best, wa, wb):
                best, wa, wb = m, a, b
    return best, int(wa), int(wb)


def strip_scan(x, y, slopes, half_width):
    """For each point, the index into ``slopes`` of the first strip free of other points.

    A strip through point ``i`` at slope ``s`` contains ``q`` when
    ``|y[q] - y[i] - s * (x[q] - x[i])| <= half_width``. Returns -1 where no
    slope works.
    """
    n = x.shape[0]
    out = np.full(n, -1, dtype=np.int64)
    s = np.asarray(slopes, dtype=np.float64)[:, None]
    for i in range(n):
        dx = x - x[i]
        dy = y - y[i]
        d = np.abs(dy[None, :] - s * dx[None, :])
        d[:, i] = np.inf
        free = ~(d <= half_width).any(axis=1)
        hits = np.flatnonzero(free)
        if hits.size:
            out[i] = hits[0]
    return out
