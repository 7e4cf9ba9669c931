"""Pre-rasterization transforms on anchor points.

Everything here acts on outlines in vector space: the composed 2x2 linear
map (rotation * shear * inserted map * scale), random vibration of
independent anchor points, ascender/descender length variation, and the
font-unit to pixel-grid scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from charsynth.errors import DegenerateOutline
from charsynth.fontio.parser import AnchorPoint, GlyphOutline

_AREA_TOL = 1e-9


@dataclass(frozen=True)
class LinearTransformParams:
    """Parameters of the composed linear transform.

    theta: counter-clockwise rotation in degrees; lambda1/lambda2: horizontal
    and vertical shear; alpha..delta: an arbitrary inserted linear map;
    s1/s2: horizontal and vertical scale (stretch when unequal).
    """

    theta: float = 0.0
    lambda1: float = 0.0
    lambda2: float = 0.0
    alpha: float = 1.0
    beta: float = 0.0
    gamma: float = 0.0
    delta: float = 1.0
    s1: float = 1.0
    s2: float = 1.0

    def validate(self) -> None:
        values = (
            self.theta, self.lambda1, self.lambda2, self.alpha,
            self.beta, self.gamma, self.delta, self.s1, self.s2,
        )
        if not all(math.isfinite(v) for v in values):
            raise ValueError("linear transform parameters must be finite")
        if self.s1 <= 0 or self.s2 <= 0:
            raise ValueError("scale factors must be positive")


@dataclass(frozen=True)
class Matrix2:
    """Row-major 2x2 matrix [[a, b], [d, e]]."""

    a: float
    b: float
    d: float
    e: float

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return (self.a * x + self.b * y, self.d * x + self.e * y)

    def matmul(self, other: "Matrix2") -> "Matrix2":
        return Matrix2(
            a=self.a * other.a + self.b * other.d,
            b=self.a * other.b + self.b * other.e,
            d=self.d * other.a + self.e * other.d,
            e=self.d * other.b + self.e * other.e,
        )

    @staticmethod
    def identity() -> "Matrix2":
        return Matrix2(1.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class ElasticParams:
    """Random vibration of independent anchor points.

    magnitude_k is in font units. The default law draws integer offsets
    uniformly from [-k, k] per axis; "continuous_uniform" draws reals.
    """

    magnitude_k: float
    seed: int
    law: str = "integer_uniform"

    def validate(self) -> None:
        if self.magnitude_k < 0:
            raise ValueError("magnitude_k must be >= 0")
        if self.law not in ("integer_uniform", "continuous_uniform"):
            raise ValueError(f"unknown elastic law {self.law!r}")


@dataclass(frozen=True)
class ProportionParams:
    """Shift of points above/below thresholds (ascender/descender length)."""

    ascender_delta: float = 0.0
    descender_delta: float = 0.0
    ascender_threshold: float = 0.0
    descender_threshold: float = 0.0

    def validate(self) -> None:
        if not (self.ascender_threshold >= 0 >= self.descender_threshold):
            raise ValueError("thresholds must satisfy ascender >= 0 >= descender")


def compose_linear(p: LinearTransformParams) -> Matrix2:
    """Closed form of rotation(theta) @ shear(l1,l2) @ [[a,b],[g,d]] @ diag(s1,s2)."""
    p.validate()
    rad = math.radians(p.theta)
    cos, sin = math.cos(rad), math.sin(rad)
    l1, l2 = p.lambda1, p.lambda2
    al, be, ga, de = p.alpha, p.beta, p.gamma, p.delta
    return Matrix2(
        a=p.s1 * ((al + ga * l1) * cos - (al * l2 + ga) * sin),
        b=p.s2 * ((be + de * l1) * cos - (be * l2 + de) * sin),
        d=p.s1 * ((al + ga * l1) * sin + (al * l2 + ga) * cos),
        e=p.s2 * ((be + de * l1) * sin + (be * l2 + de) * cos),
    )


def _map_outline(g: GlyphOutline, fn, advance: float) -> GlyphOutline:
    contours = tuple(
        tuple(AnchorPoint(*fn(p.x, p.y), p.on_curve) for p in contour)
        for contour in g.contours
    )
    return GlyphOutline(contours=contours, advance_width=advance)


def apply_linear(g: GlyphOutline, m: Matrix2) -> GlyphOutline:
    """Replace every anchor point by m @ (x, y), about the origin.

    The advance is recomputed from the transformed bounding box plus the
    original side bearings scaled by the horizontal stretch of m.
    """
    if g.is_empty():
        sx = math.hypot(m.a, m.d)
        return GlyphOutline(contours=(), advance_width=g.advance_width * sx)
    xmin0, _, xmax0, _ = g.bbox()
    lsb = xmin0
    rsb = g.advance_width - xmax0
    out = _map_outline(g, m.apply, g.advance_width)
    xmin1, _, xmax1, _ = out.bbox()
    sx = math.hypot(m.a, m.d)
    advance = (xmax1 - xmin1) + sx * (lsb + rsb)
    return GlyphOutline(contours=out.contours, advance_width=advance)


def apply_linear_about_center(g: GlyphOutline, m: Matrix2) -> GlyphOutline:
    """apply_linear with the bounding-box center as the fixed point."""
    if g.is_empty():
        return apply_linear(g, m)
    xmin, ymin, xmax, ymax = g.bbox()
    cx, cy = (xmin + xmax) / 2.0, (ymin + ymax) / 2.0
    shifted = _map_outline(g, lambda x, y: (x - cx, y - cy), g.advance_width)
    transformed = apply_linear(shifted, m)
    return _map_outline(
        transformed, lambda x, y: (x + cx, y + cy), transformed.advance_width
    )


def _draw_delta(rng: np.random.Generator, p: ElasticParams) -> tuple[float, float]:
    if p.magnitude_k == 0:
        return (0.0, 0.0)
    if p.law == "integer_uniform":
        k = int(round(p.magnitude_k))
        if k == 0:
            return (0.0, 0.0)
        dx, dy = rng.integers(-k, k + 1, size=2)
        return (float(dx), float(dy))
    dx, dy = rng.uniform(-p.magnitude_k, p.magnitude_k, size=2)
    return (float(dx), float(dy))


def elastic_perturb(gs, p: ElasticParams):
    """Displace every anchor point of every outline independently.

    One delta pair is drawn per (glyph index, point index) in a fixed order,
    so the same materialized outlines serve both the bounding-box pass and
    the render pass.
    """
    p.validate()
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(p.seed)))
    out = []
    for g in gs:
        contours = []
        for contour in g.contours:
            pts = []
            for point in contour:
                dx, dy = _draw_delta(rng, p)
                pts.append(AnchorPoint(point.x + dx, point.y + dy, point.on_curve))
            contours.append(tuple(pts))
        out.append(GlyphOutline(contours=tuple(contours), advance_width=g.advance_width))
    return out


def _contour_area(contour) -> float:
    area = 0.0
    n = len(contour)
    for i in range(n):
        p, q = contour[i], contour[(i + 1) % n]
        area += p.x * q.y - q.x * p.y
    return area / 2.0


def vary_proportion(g: GlyphOutline, p: ProportionParams) -> GlyphOutline:
    """Shift points above the ascender threshold and below the descender one."""
    p.validate()

    def shift(x, y):
        if y > p.ascender_threshold:
            return (x, y + p.ascender_delta)
        if y < p.descender_threshold:
            return (x, y + p.descender_delta)
        return (x, y)

    out = _map_outline(g, shift, g.advance_width)
    for before, after in zip(g.contours, out.contours):
        if abs(_contour_area(after)) < _AREA_TOL <= abs(_contour_area(before)):
            raise DegenerateOutline(
                "proportion variation collapsed a contour to zero area"
            )
    return out


def scale_to_grid(g: GlyphOutline, units_per_em: int, em_px: float) -> GlyphOutline:
    """Scale font units to pixels (real-valued, never snapped)."""
    if units_per_em <= 0 or em_px <= 0:
        raise ValueError("units_per_em and em_px must be positive")
    s = em_px / units_per_em
    return _map_outline(g, lambda x, y: (x * s, y * s), g.advance_width * s)
