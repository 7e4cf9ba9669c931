"""Backend-independent filter construction (tap indices and weights)."""

from __future__ import annotations

import math

import numpy as np


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian taps with radius ceil(3*sigma); [1] when sigma=0."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return np.array([1.0])
    r = math.ceil(3.0 * sigma)
    xs = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-(xs * xs) / (2.0 * sigma * sigma))
    return k / k.sum()


def _lanczos(t: float, a: int) -> float:
    if t == 0.0:
        return 1.0
    if abs(t) >= a:
        return 0.0
    pt = math.pi * t
    return a * math.sin(pt) * math.sin(pt / a) / (pt * pt)


def lanczos_plan(src_len: int, dst_len: int, a: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """Tap indices and normalized weights for 1-D Lanczos resampling.

    The filter is dilated by the scale factor when downscaling. Out-of-range
    taps get zero weight (and a clamped index for safe gathering); remaining
    weights are renormalized per output pixel.
    """
    if src_len <= 0 or dst_len <= 0:
        raise ValueError("lengths must be positive")
    if a < 1:
        raise ValueError("window parameter a must be >= 1")
    scale = src_len / dst_len
    fscale = max(1.0, scale)
    support = a * fscale
    taps = int(math.ceil(2 * support)) + 1
    indices = np.zeros((dst_len, taps), dtype=np.int64)
    weights = np.zeros((dst_len, taps), dtype=np.float64)
    for i in range(dst_len):
        center = (i + 0.5) * scale - 0.5
        lo = int(math.floor(center - support)) + 1
        total = 0.0
        for j in range(taps):
            src = lo + j
            if 0 <= src < src_len:
                w = _lanczos((src - center) / fscale, a)
                indices[i, j] = src
                weights[i, j] = w
                total += w
        if total != 0.0:
            weights[i] /= total
    return indices, weights
