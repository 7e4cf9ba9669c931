"""Color science: sRGB to Lab conversion (D65) and the CIEDE2000 distance,
plus rejection sampling of visually distinguishable color pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from charsynth.errors import SamplingExhausted

# sRGB (D65) linear-light to XYZ, rows scaled so white maps exactly to the
# reference illuminant used below.
_RGB_TO_XYZ = (
    (0.4124564, 0.3575761, 0.1804375),
    (0.2126729, 0.7151522, 0.0721750),
    (0.0193339, 0.1191920, 0.9503041),
)
_WHITE = (95.047, 100.0, 108.883)
_EPS = 216.0 / 24389.0  # (6/29)^3
_KAPPA = 24389.0 / 27.0


@dataclass(frozen=True)
class RgbColor:
    r: int
    g: int
    b: int

    def __post_init__(self):
        for v in (self.r, self.g, self.b):
            if not 0 <= v <= 255:
                raise ValueError("RGB channels must be 8-bit")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.r, self.g, self.b)


@dataclass(frozen=True)
class LabColor:
    L: float
    a: float
    b: float

    def __post_init__(self):
        if not 0.0 <= self.L <= 100.0 + 1e-9:
            raise ValueError("L must be within [0, 100]")


def _linearize(c: float) -> float:
    c = c / 255.0
    if c <= 0.04045:
        return c / 12.92
    return ((c + 0.055) / 1.055) ** 2.4


def _f(t: float) -> float:
    if t > _EPS:
        return t ** (1.0 / 3.0)
    return (_KAPPA * t + 16.0) / 116.0


def rgb_to_lab(c: RgbColor) -> LabColor:
    """Linearize, convert to XYZ under D65, then to Lab."""
    rl, gl, bl = _linearize(c.r), _linearize(c.g), _linearize(c.b)
    xyz = [
        100.0 * (m[0] * rl + m[1] * gl + m[2] * bl) for m in _RGB_TO_XYZ
    ]
    fx, fy, fz = (_f(v / n) for v, n in zip(xyz, _WHITE))
    # The rounded matrix rows can overshoot the white point by ~1e-7; keep L in range.
    lum = min(100.0, max(0.0, 116.0 * fy - 16.0))
    return LabColor(L=lum, a=500.0 * (fx - fy), b=200.0 * (fy - fz))


def delta_e_2000(x: LabColor, y: LabColor) -> float:
    """CIEDE2000 with the default weighting factors kL = kC = kH = 1."""
    l1, a1, b1 = x.L, x.a, x.b
    l2, a2, b2 = y.L, y.a, y.b
    c1 = math.hypot(a1, b1)
    c2 = math.hypot(a2, b2)
    c_bar = (c1 + c2) / 2.0
    g = 0.5 * (1.0 - math.sqrt(c_bar**7 / (c_bar**7 + 25.0**7)))
    a1p = (1.0 + g) * a1
    a2p = (1.0 + g) * a2
    c1p = math.hypot(a1p, b1)
    c2p = math.hypot(a2p, b2)

    def hue(ap, b):
        if ap == 0.0 and b == 0.0:
            return 0.0
        h = math.degrees(math.atan2(b, ap))
        return h + 360.0 if h < 0 else h

    h1p = hue(a1p, b1)
    h2p = hue(a2p, b2)

    dl = l2 - l1
    dc = c2p - c1p
    if c1p * c2p == 0.0:
        dh_angle = 0.0
    else:
        diff = h2p - h1p
        if abs(diff) <= 180.0:
            dh_angle = diff
        elif diff > 180.0:
            dh_angle = diff - 360.0
        else:
            dh_angle = diff + 360.0
    dh = 2.0 * math.sqrt(c1p * c2p) * math.sin(math.radians(dh_angle) / 2.0)

    l_bar = (l1 + l2) / 2.0
    c_bar_p = (c1p + c2p) / 2.0
    if c1p * c2p == 0.0:
        h_bar = h1p + h2p
    elif abs(h1p - h2p) <= 180.0:
        h_bar = (h1p + h2p) / 2.0
    elif h1p + h2p < 360.0:
        h_bar = (h1p + h2p + 360.0) / 2.0
    else:
        h_bar = (h1p + h2p - 360.0) / 2.0

    t = (
        1.0
        - 0.17 * math.cos(math.radians(h_bar - 30.0))
        + 0.24 * math.cos(math.radians(2.0 * h_bar))
        + 0.32 * math.cos(math.radians(3.0 * h_bar + 6.0))
        - 0.20 * math.cos(math.radians(4.0 * h_bar - 63.0))
    )
    d_theta = 30.0 * math.exp(-(((h_bar - 275.0) / 25.0) ** 2))
    rc = 2.0 * math.sqrt(c_bar_p**7 / (c_bar_p**7 + 25.0**7))
    sl = 1.0 + 0.015 * (l_bar - 50.0) ** 2 / math.sqrt(20.0 + (l_bar - 50.0) ** 2)
    sc = 1.0 + 0.045 * c_bar_p
    sh = 1.0 + 0.015 * c_bar_p * t
    rt = -math.sin(math.radians(2.0 * d_theta)) * rc
    return math.sqrt(
        (dl / sl) ** 2
        + (dc / sc) ** 2
        + (dh / sh) ** 2
        + rt * (dc / sc) * (dh / sh)
    )


def delta_e_rgb(x: RgbColor, y: RgbColor) -> float:
    return delta_e_2000(rgb_to_lab(x), rgb_to_lab(y))


_MAX_REJECTIONS = 1000


def sample_color_pair(rng: np.random.Generator, threshold: float) -> tuple[RgbColor, RgbColor]:
    """Uniform 8-bit RGB pairs, rejection-filtered until the CIEDE2000
    distance reaches `threshold`."""
    if threshold <= 0 and threshold != 0:
        raise ValueError("threshold must be >= 0")
    for _ in range(_MAX_REJECTIONS + 1):
        vals = rng.integers(0, 256, size=6)
        fg = RgbColor(int(vals[0]), int(vals[1]), int(vals[2]))
        bg = RgbColor(int(vals[3]), int(vals[4]), int(vals[5]))
        if delta_e_rgb(fg, bg) >= threshold:
            return fg, bg
    raise SamplingExhausted(
        f"no color pair with deltaE >= {threshold} after {_MAX_REJECTIONS} rejections"
    )
