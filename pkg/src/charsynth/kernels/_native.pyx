# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of charsynth.kernels.purepy.

Same arithmetic and accumulation order as the numpy fallback, so both
backends produce matching results; these exist purely for speed.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, floor, INFINITY

cnp.import_array()

SUPERSAMPLE = 4
DEF SS = 4


def fill_coverage(edges, int width, int height):
    out = np.zeros((height, width), dtype=np.float64)
    e = np.ascontiguousarray(np.asarray(edges, dtype=np.float64).reshape(-1, 4))
    if e.shape[0] == 0 or width <= 0 or height <= 0:
        return out
    cdef double[:, ::1] ev = e
    cdef double[:, ::1] outv = out
    cdef int sw = width * SS
    cdef cnp.ndarray[cnp.int32_t, ndim=1] delta_arr = np.zeros(sw + 1, dtype=np.int32)
    cdef int[::1] delta = delta_arr
    cdef cnp.ndarray[cnp.int32_t, ndim=1] counts_arr = np.zeros(width, dtype=np.int32)
    cdef int[::1] counts = counts_arr
    cdef Py_ssize_t n_edges = ev.shape[0]
    cdef Py_ssize_t eidx, i, px
    cdef int sy, sx, py, w_acc, first
    cdef double y, x0, y0, x1, y1, t, xi
    cdef int direction

    for py in range(height):
        for i in range(width):
            counts[i] = 0
        for sy in range(py * SS, (py + 1) * SS):
            y = (sy + 0.5) / SS
            for i in range(sw + 1):
                delta[i] = 0
            for eidx in range(n_edges):
                x0 = ev[eidx, 0]
                y0 = ev[eidx, 1]
                x1 = ev[eidx, 2]
                y1 = ev[eidx, 3]
                if y0 <= y < y1:
                    direction = 1
                elif y1 <= y < y0:
                    direction = -1
                else:
                    continue
                t = (y - y0) / (y1 - y0)
                xi = x0 + t * (x1 - x0)
                first = <int>ceil(SS * xi - 0.5)
                if first < 0:
                    first = 0
                elif first > sw:
                    first = sw
                delta[first] += direction
            w_acc = 0
            for sx in range(sw):
                w_acc += delta[sx]
                if w_acc != 0:
                    counts[sx // SS] += 1
        for px in range(width):
            outv[py, px] = counts[px] / <double>(SS * SS)
    return out


def convolve_sep(img, kernel):
    k = np.asarray(kernel, dtype=np.float64)
    arr = np.asarray(img, dtype=np.float64)
    if k.size == 1:
        return arr * k[0]
    squeeze = arr.ndim == 2
    if squeeze:
        arr = arr[:, :, None]
    arr = np.ascontiguousarray(arr)
    cdef double[:, :, ::1] src = arr
    cdef double[::1] kv = np.ascontiguousarray(k)
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1], c = src.shape[2]
    cdef Py_ssize_t r = kv.shape[0] // 2
    cdef Py_ssize_t n = kv.shape[0]
    tmp = np.zeros((h, w, c), dtype=np.float64)
    out = np.zeros((h, w, c), dtype=np.float64)
    cdef double[:, :, ::1] tv = tmp
    cdef double[:, :, ::1] ov = out
    cdef Py_ssize_t y, x, ch, i, idx
    cdef double acc
    for y in range(h):
        for x in range(w):
            for ch in range(c):
                acc = 0.0
                for i in range(n):
                    idx = x - r + i
                    if idx < 0:
                        idx = 0
                    elif idx >= w:
                        idx = w - 1
                    acc += kv[i] * src[y, idx, ch]
                tv[y, x, ch] = acc
    for y in range(h):
        for x in range(w):
            for ch in range(c):
                acc = 0.0
                for i in range(n):
                    idx = y - r + i
                    if idx < 0:
                        idx = 0
                    elif idx >= h:
                        idx = h - 1
                    acc += kv[i] * tv[idx, x, ch]
                ov[y, x, ch] = acc
    return out[:, :, 0] if squeeze else out


def block_reduce(img, int k):
    arr = np.asarray(img, dtype=np.float64)
    if k == 1:
        return arr.copy()
    squeeze = arr.ndim == 2
    if squeeze:
        arr = arr[:, :, None]
    arr = np.ascontiguousarray(arr)
    cdef double[:, :, ::1] src = arr
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1], c = src.shape[2]
    cdef Py_ssize_t hh = (h + k - 1) // k, ww = (w + k - 1) // k
    out = np.zeros((hh, ww, c), dtype=np.float64)
    cdef double[:, :, ::1] ov = out
    cdef Py_ssize_t y, x, ch, ky, kx, sy, sx
    cdef double acc
    for y in range(hh):
        for x in range(ww):
            for ch in range(c):
                acc = 0.0
                for ky in range(k):
                    for kx in range(k):
                        sy = y * k + ky
                        sx = x * k + kx
                        if sy >= h:
                            sy = h - 1
                        if sx >= w:
                            sx = w - 1
                        acc += src[sy, sx, ch]
                ov[y, x, ch] = acc / <double>(k * k)
    return out[:, :, 0] if squeeze else out


def resample_axis(img, indices, weights, int axis):
    arr = np.asarray(img, dtype=np.float64)
    squeeze = arr.ndim == 2
    if squeeze:
        arr = arr[:, :, None]
    if axis == 0:
        arr = np.ascontiguousarray(np.swapaxes(arr, 0, 1))
    else:
        arr = np.ascontiguousarray(arr)
    # now resampling runs along axis 1 of `arr`
    cdef double[:, :, ::1] src = arr
    cdef long long[:, ::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef double[:, ::1] wv = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t h = src.shape[0], c = src.shape[2]
    cdef Py_ssize_t n_out = idx.shape[0], taps = idx.shape[1]
    out = np.zeros((h, n_out, c), dtype=np.float64)
    cdef double[:, :, ::1] ov = out
    cdef Py_ssize_t y, i, j, ch
    cdef double acc
    for y in range(h):
        for i in range(n_out):
            for ch in range(c):
                acc = 0.0
                for j in range(taps):
                    acc += wv[i, j] * src[y, idx[i, j], ch]
                ov[y, i, ch] = acc
    if axis == 0:
        out = np.swapaxes(out, 0, 1).copy()
    return out[:, :, 0] if squeeze else out


def bilinear_warp(img, map_x, map_y, fill):
    arr = np.asarray(img, dtype=np.float64)
    squeeze = arr.ndim == 2
    if squeeze:
        arr = arr[:, :, None]
    arr = np.ascontiguousarray(arr)
    cdef double[:, :, ::1] src = arr
    cdef double[:, ::1] mx = np.ascontiguousarray(map_x, dtype=np.float64)
    cdef double[:, ::1] my = np.ascontiguousarray(map_y, dtype=np.float64)
    fill_arr = np.broadcast_to(np.asarray(fill, dtype=np.float64).ravel(), (src.shape[2],)).copy()
    cdef double[::1] fv = fill_arr
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1], c = src.shape[2]
    cdef Py_ssize_t oh = mx.shape[0], ow = mx.shape[1]
    out = np.zeros((oh, ow, c), dtype=np.float64)
    cdef double[:, :, ::1] ov = out
    cdef Py_ssize_t y, x, ch
    cdef Py_ssize_t x0, y0, x1, y1
    cdef double sx, sy, xc, yc, fx, fy, top, bot
    for y in range(oh):
        for x in range(ow):
            sx = mx[y, x]
            sy = my[y, x]
            if sx >= 0 and sx <= w - 1 and sy >= 0 and sy <= h - 1:
                xc = sx
                yc = sy
                x0 = <Py_ssize_t>floor(xc)
                y0 = <Py_ssize_t>floor(yc)
                x1 = x0 + 1
                if x1 > w - 1:
                    x1 = w - 1
                y1 = y0 + 1
                if y1 > h - 1:
                    y1 = h - 1
                fx = xc - x0
                fy = yc - y0
                for ch in range(c):
                    top = src[y0, x0, ch] * (1.0 - fx) + src[y0, x1, ch] * fx
                    bot = src[y1, x0, ch] * (1.0 - fx) + src[y1, x1, ch] * fx
                    ov[y, x, ch] = top * (1.0 - fy) + bot * fy
            else:
                for ch in range(c):
                    ov[y, x, ch] = fv[ch]
    return out[:, :, 0] if squeeze else out


def minmax_filter(img, offsets, bint take_min):
    arr = np.ascontiguousarray(np.asarray(img, dtype=np.float64))
    cdef double[:, ::1] src = arr
    cdef long long[:, ::1] offs = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1], n = offs.shape[0]
    out = np.zeros((h, w), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t y, x, i
    cdef long long sy, sx
    cdef double best, v
    for y in range(h):
        for x in range(w):
            best = INFINITY if take_min else -INFINITY
            for i in range(n):
                sy = y + offs[i, 0]
                sx = x + offs[i, 1]
                v = src[sy, sx] if (0 <= sy < h and 0 <= sx < w) else 0.0
                if take_min:
                    if v < best:
                        best = v
                else:
                    if v > best:
                        best = v
            ov[y, x] = best
    return out


def poisson_iterate(u, rhs, interior, double tol, long long max_iters, int check_every=8):
    uu = np.ascontiguousarray(np.asarray(u, dtype=np.float64)).copy()
    rr = np.ascontiguousarray(np.asarray(rhs, dtype=np.float64))
    mm = np.ascontiguousarray(np.asarray(interior, dtype=np.uint8))
    if mm[0, :].any() or mm[-1, :].any() or mm[:, 0].any() or mm[:, -1].any():
        raise ValueError("interior mask touches the array border")
    if not mm.any():
        return uu, 0, 0.0
    cdef double[:, ::1] uv = uu
    cdef double[:, ::1] rv = rr
    cdef unsigned char[:, ::1] mv = mm
    cdef Py_ssize_t h = uv.shape[0], w = uv.shape[1]
    cdef Py_ssize_t y, x
    cdef long long iters = 0
    cdef int step, color
    cdef double res, r_abs

    def _residual():
        cdef double best = 0.0
        cdef double rloc
        cdef Py_ssize_t yy, xx
        for yy in range(1, h - 1):
            for xx in range(1, w - 1):
                if mv[yy, xx]:
                    rloc = 4.0 * uv[yy, xx] - (
                        uv[yy - 1, xx] + uv[yy + 1, xx] + uv[yy, xx - 1] + uv[yy, xx + 1]
                    ) - rv[yy, xx]
                    if rloc < 0:
                        rloc = -rloc
                    if rloc > best:
                        best = rloc
        return best

    res = _residual()
    while res > tol and iters < max_iters:
        for step in range(min(check_every, max_iters - iters)):
            for color in range(2):
                for y in range(1, h - 1):
                    for x in range(1, w - 1):
                        if mv[y, x] and (y + x) % 2 == color:
                            uv[y, x] = (
                                rv[y, x]
                                + (uv[y - 1, x] + uv[y + 1, x] + uv[y, x - 1] + uv[y, x + 1])
                            ) / 4.0
            iters += 1
        res = _residual()
    return uu, iters, res
