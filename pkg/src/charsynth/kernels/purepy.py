"""Pure-numpy implementations of the hot per-pixel kernels.

This is the fallback backend; charsynth.kernels._native implements the same
operations in Cython with identical arithmetic (same accumulation order, same
index rounding), so both backends agree to the last bit on integral results
and to ~1 ulp on float chains.
"""

from __future__ import annotations

import numpy as np

SUPERSAMPLE = 4


def fill_coverage(edges: np.ndarray, width: int, height: int) -> np.ndarray:
    """Scanline nonzero-winding fill with 4x4 supersampled coverage.

    edges: (E, 4) float64 rows (x0, y0, x1, y1) in image coordinates
    (y grows downward). Returns (height, width) coverage in [0, 1].
    """
    out = np.zeros((height, width), dtype=np.float64)
    edges = np.asarray(edges, dtype=np.float64).reshape(-1, 4)
    if edges.shape[0] == 0 or width <= 0 or height <= 0:
        return out
    ss = SUPERSAMPLE
    sw = width * ss
    x0, y0, x1, y1 = edges.T
    ys = (np.arange(height * ss, dtype=np.float64) + 0.5) / ss
    yrow = ys[None, :]
    up = (y0[:, None] <= yrow) & (yrow < y1[:, None])
    down = (y1[:, None] <= yrow) & (yrow < y0[:, None])
    e_idx, s_idx = np.nonzero(up | down)
    if e_idx.size == 0:
        return out
    dirs = np.where(up[e_idx, s_idx], np.int32(1), np.int32(-1))
    t = (ys[s_idx] - y0[e_idx]) / (y1[e_idx] - y0[e_idx])
    xi = x0[e_idx] + t * (x1[e_idx] - x0[e_idx])
    first = np.ceil(ss * xi - 0.5).astype(np.int64)
    np.clip(first, 0, sw, out=first)
    delta = np.zeros((height * ss, sw + 1), dtype=np.int32)
    np.add.at(delta, (s_idx, first), dirs)
    winding = np.cumsum(delta[:, :sw], axis=1, dtype=np.int32)
    inside = winding != 0
    counts = inside.reshape(height, ss, width, ss).sum(axis=(1, 3))
    return counts.astype(np.float64) / (ss * ss)


def convolve_sep(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Separable convolution (x then y) with clamp-to-edge borders."""
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.size == 1:
        return img.astype(np.float64) * kernel[0]
    r = kernel.size // 2

    def conv_axis(arr, axis):
        pad = [(0, 0)] * arr.ndim
        pad[axis] = (r, r)
        padded = np.pad(arr, pad, mode="edge")
        out = np.zeros_like(arr)
        for i in range(kernel.size):
            sl = [slice(None)] * arr.ndim
            sl[axis] = slice(i, i + arr.shape[axis])
            out += kernel[i] * padded[tuple(sl)]
        return out

    img = np.asarray(img, dtype=np.float64)
    return conv_axis(conv_axis(img, 1), 0)


def block_reduce(img: np.ndarray, k: int) -> np.ndarray:
    """Mean over k x k blocks; dimensions padded by edge-clamp when needed."""
    img = np.asarray(img, dtype=np.float64)
    if k == 1:
        return img.copy()
    h, w = img.shape[:2]
    hh = -(-h // k) * k
    ww = -(-w // k) * k
    if hh != h or ww != w:
        pad = [(0, hh - h), (0, ww - w)] + [(0, 0)] * (img.ndim - 2)
        img = np.pad(img, pad, mode="edge")
    out_shape = (hh // k, ww // k) + img.shape[2:]
    acc = np.zeros(out_shape, dtype=np.float64)
    for ky in range(k):
        for kx in range(k):
            acc += img[ky::k, kx::k]
    return acc / (k * k)


def resample_axis(img: np.ndarray, indices: np.ndarray, weights: np.ndarray, axis: int) -> np.ndarray:
    """Weighted gather along one axis: out[i] = sum_j w[i,j] * img[idx[i,j]]."""
    img = np.asarray(img, dtype=np.float64)
    moved = np.moveaxis(img, axis, 0)
    n_out, taps = indices.shape
    out = np.zeros((n_out,) + moved.shape[1:], dtype=np.float64)
    for j in range(taps):
        w = weights[:, j].reshape((n_out,) + (1,) * (moved.ndim - 1))
        out += w * moved[indices[:, j]]
    return np.moveaxis(out, 0, axis)


def bilinear_warp(img: np.ndarray, map_x: np.ndarray, map_y: np.ndarray, fill) -> np.ndarray:
    """Inverse-mapped bilinear sampling; out-of-source pixels take `fill`."""
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    valid = (map_x >= 0) & (map_x <= w - 1) & (map_y >= 0) & (map_y <= h - 1)
    xc = np.clip(map_x, 0, w - 1)
    yc = np.clip(map_y, 0, h - 1)
    x0 = np.floor(xc).astype(np.int64)
    y0 = np.floor(yc).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xc - x0
    fy = yc - y0
    if img.ndim == 3:
        fx = fx[..., None]
        fy = fy[..., None]
        valid_b = valid[..., None]
    else:
        valid_b = valid
    top = img[y0, x0] * (1.0 - fx) + img[y0, x1] * fx
    bot = img[y1, x0] * (1.0 - fx) + img[y1, x1] * fx
    value = top * (1.0 - fy) + bot * fy
    fill_arr = np.asarray(fill, dtype=np.float64)
    return np.where(valid_b, value, fill_arr)


def minmax_filter(img: np.ndarray, offsets: np.ndarray, take_min: bool) -> np.ndarray:
    """Min/max over the offset neighborhood; outside-image cells read as 0."""
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape
    out = np.full((h, w), np.inf if take_min else -np.inf)
    for dy, dx in offsets:
        shifted = np.zeros((h, w), dtype=np.float64)
        ys0, ys1 = max(0, -dy), min(h, h - dy)
        xs0, xs1 = max(0, -dx), min(w, w - dx)
        if ys0 < ys1 and xs0 < xs1:
            shifted[ys0:ys1, xs0:xs1] = img[ys0 + dy : ys1 + dy, xs0 + dx : xs1 + dx]
        if take_min:
            np.minimum(out, shifted, out=out)
        else:
            np.maximum(out, shifted, out=out)
    return out


def poisson_iterate(
    u: np.ndarray,
    rhs: np.ndarray,
    interior: np.ndarray,
    tol: float,
    max_iters: int,
    check_every: int = 8,
) -> tuple[np.ndarray, int, float]:
    """Red-black Gauss-Seidel for 4*u[p] - sum(u[q]) = rhs[p] on interior pixels.

    Non-interior values of u are Dirichlet data and stay fixed. The interior
    mask must not touch the array border. Returns (u, iterations, residual).
    """
    u = np.asarray(u, dtype=np.float64).copy()
    rhs = np.asarray(rhs, dtype=np.float64)
    interior = np.asarray(interior, dtype=bool)
    if interior[0, :].any() or interior[-1, :].any() or interior[:, 0].any() or interior[:, -1].any():
        raise ValueError("interior mask touches the array border")
    if not interior.any():
        return u, 0, 0.0
    h, w = u.shape
    yy, xx = np.indices((h, w))
    parity = (yy + xx) % 2 == 0
    red = interior & parity
    black = interior & ~parity

    def neighbor_sum():
        ns = np.zeros_like(u)
        ns[1:-1, 1:-1] = u[:-2, 1:-1] + u[2:, 1:-1] + u[1:-1, :-2] + u[1:-1, 2:]
        return ns

    def residual():
        ns = neighbor_sum()
        return float(np.max(np.abs(4.0 * u - ns - rhs)[interior]))

    res = residual()
    iters = 0
    while res > tol and iters < max_iters:
        steps = min(check_every, max_iters - iters)
        for _ in range(steps):
            ns = neighbor_sum()
            u[red] = (rhs[red] + ns[red]) / 4.0
            ns = neighbor_sum()
            u[black] = (rhs[black] + ns[black]) / 4.0
        iters += steps
        res = residual()
    return u, iters, res
