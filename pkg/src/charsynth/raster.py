"""Outline flattening, anti-aliased coverage rasterization, and the
three-step resize chain (Gaussian smoothing, integer reduction, Lanczos).

Coverage bitmaps are (height, width) float64 arrays with samples in [0, 1]
(1 = fully inked). Rasterization uses the nonzero winding rule with 4x4
supersampled pixel coverage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from charsynth import kernels
from charsynth.errors import EmptyRendering
from charsynth.fontio.parser import FontFace, GlyphOutline, glyph_for
from charsynth.kernels.plans import gaussian_kernel, lanczos_plan
from charsynth.vector import (
    ElasticParams,
    Matrix2,
    ProportionParams,
    apply_linear_about_center,
    elastic_perturb,
    scale_to_grid,
    vary_proportion,
)

DEFAULT_FLATTEN_TOL = 0.1  # px
DEFAULT_PADDING_FRAC = 0.05  # of em, each side


def _subdivide(p0, p1, p2, tol, out):
    # Max curve-to-chord distance of a quadratic is |p1 - (p0+p2)/2| / 2.
    dx = p1[0] - (p0[0] + p2[0]) / 2.0
    dy = p1[1] - (p0[1] + p2[1]) / 2.0
    if math.hypot(dx, dy) / 2.0 < tol:
        out.append(p2)
        return
    l1 = ((p0[0] + p1[0]) / 2.0, (p0[1] + p1[1]) / 2.0)
    r1 = ((p1[0] + p2[0]) / 2.0, (p1[1] + p2[1]) / 2.0)
    mid = ((l1[0] + r1[0]) / 2.0, (l1[1] + r1[1]) / 2.0)
    _subdivide(p0, l1, mid, tol, out)
    _subdivide(mid, r1, p2, tol, out)


def flatten_outline(g: GlyphOutline, tol: float = DEFAULT_FLATTEN_TOL) -> list[np.ndarray]:
    """Closed polylines approximating each contour within `tol` of the curves."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    polylines = []
    for contour in g.contours:
        n = len(contour)
        i = next((k for k in range(n) if contour[k].on_curve), None)
        if i is None:
            continue
        verts = [(contour[i].x, contour[i].y)]
        k = i
        steps = 0
        while steps < n:
            cur = contour[k % n]
            nxt = contour[(k + 1) % n]
            if nxt.on_curve:
                verts.append((nxt.x, nxt.y))
                k += 1
                steps += 1
            else:
                end = contour[(k + 2) % n]  # normalized outlines alternate
                _subdivide(
                    (cur.x, cur.y), (nxt.x, nxt.y), (end.x, end.y), tol, verts
                )
                k += 2
                steps += 2
        if len(verts) > 1 and verts[0] == verts[-1]:
            verts.pop()
        if len(verts) >= 2:
            polylines.append(np.array(verts, dtype=np.float64))
    return polylines


def polyline_edges(polylines) -> np.ndarray:
    """Stack closed polylines into an (E, 4) edge array (x0, y0, x1, y1)."""
    rows = []
    for poly in polylines:
        closed = np.vstack([poly, poly[:1]])
        rows.append(np.hstack([closed[:-1], closed[1:]]))
    if not rows:
        return np.zeros((0, 4), dtype=np.float64)
    return np.vstack(rows)


def fill_coverage(polylines, width: int, height: int) -> np.ndarray:
    """Rasterize closed polylines to per-pixel coverage (nonzero winding)."""
    if width <= 0 or height <= 0:
        raise ValueError("width and height must be positive")
    return kernels.fill_coverage(polyline_edges(polylines), width, height)


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian convolution with clamped edges; sigma=0 is identity."""
    return kernels.convolve_sep(np.asarray(img, dtype=np.float64), gaussian_kernel(sigma))


def reduce_integer(img: np.ndarray, k: int) -> np.ndarray:
    """Mean over k x k blocks (edge-clamp padding for indivisible sizes)."""
    if k < 1:
        raise ValueError("reduction factor must be >= 1")
    return kernels.block_reduce(img, k)


def lanczos_resize(
    img: np.ndarray,
    target_w: int,
    target_h: int,
    a: int = 3,
    clamp: tuple[float, float] = (0.0, 1.0),
) -> np.ndarray:
    """Separable Lanczos resampling with per-pixel weight normalization."""
    if target_w <= 0 or target_h <= 0:
        raise ValueError("target size must be positive")
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    idx_x, w_x = lanczos_plan(w, target_w, a)
    out = kernels.resample_axis(img, idx_x, w_x, axis=1)
    idx_y, w_y = lanczos_plan(h, target_h, a)
    out = kernels.resample_axis(out, idx_y, w_y, axis=0)
    return np.clip(out, clamp[0], clamp[1])


@dataclass(frozen=True)
class ResizePlan:
    """The three-step chain from a high-resolution render down to a target."""

    target_w: int
    target_h: int
    gaussian_sigma: float
    integer_factor: int
    lanczos_a: int = 3

    def validate(self) -> None:
        if self.integer_factor < 1 or self.gaussian_sigma < 0:
            raise ValueError("invalid resize plan")


def plan_resize(src_w: int, src_h: int, target_w: int, target_h: int, lanczos_a: int = 3) -> ResizePlan:
    """Pick the largest integer reduction that stays at/above the target, plus
    a Gaussian whose cutoff tracks the total downscale ratio (0.4 * ratio)."""
    ratio = max(src_w / target_w, src_h / target_h)
    sigma = 0.4 * ratio if ratio > 1 else 0.0
    k = max(1, min(src_w // target_w, src_h // target_h))
    return ResizePlan(target_w, target_h, sigma, k, lanczos_a)


def run_resize(img: np.ndarray, plan: ResizePlan, clamp=(0.0, 1.0)) -> np.ndarray:
    plan.validate()
    out = gaussian_blur(img, plan.gaussian_sigma)
    out = reduce_integer(out, plan.integer_factor)
    return lanczos_resize(out, plan.target_w, plan.target_h, plan.lanczos_a, clamp)


@dataclass(frozen=True)
class PreRasterBundle:
    """Vector-space transforms applied before rasterization."""

    elastic: ElasticParams | None = None
    proportion: ProportionParams | None = None
    linear: Matrix2 | None = None
    flatten_tol: float = DEFAULT_FLATTEN_TOL


@dataclass
class TextLayout:
    """Placement bookkeeping from the two-pass render."""

    canvas_w: int
    canvas_h: int
    pen_positions: list[float] = field(default_factory=list)
    advances: list[float] = field(default_factory=list)
    ink_bbox: tuple[int, int, int, int] = (0, 0, 0, 0)  # x0, y0, x1, y1 exclusive


def ink_bbox(coverage: np.ndarray) -> tuple[int, int, int, int]:
    ys, xs = np.nonzero(coverage > 0)
    if ys.size == 0:
        return (0, 0, 0, 0)
    return (int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)


def render_text(
    face: FontFace,
    cps,
    pre: PreRasterBundle,
    em_px: float,
    padding_frac: float = DEFAULT_PADDING_FRAC,
) -> tuple[np.ndarray, TextLayout]:
    """Render a code point sequence to one coverage bitmap.

    Pipeline per glyph: load, elastic vibration (deltas materialized once and
    reused by the bounding-box and fill passes), proportion variation, scale
    to the pixel grid, linear transform about the glyph center. Glyphs are
    laid out left to right by advance; the canvas is the pass-1 bounding box
    plus padding.
    """
    cps = list(cps)
    outlines = [glyph_for(face, cp) for cp in cps]
    if pre.elastic is not None:
        outlines = elastic_perturb(outlines, pre.elastic)
    if pre.proportion is not None:
        outlines = [vary_proportion(g, pre.proportion) for g in outlines]
    outlines = [scale_to_grid(g, face.units_per_em, em_px) for g in outlines]
    if pre.linear is not None:
        outlines = [apply_linear_about_center(g, pre.linear) for g in outlines]

    pen = 0.0
    pens = []
    polylines = []
    xs_min = ys_min = math.inf
    xs_max = ys_max = -math.inf
    for g in outlines:
        pens.append(pen)
        for poly in flatten_outline(g, pre.flatten_tol):
            shifted = poly + np.array([pen, 0.0])
            polylines.append(shifted)
            xs_min = min(xs_min, shifted[:, 0].min())
            xs_max = max(xs_max, shifted[:, 0].max())
            ys_min = min(ys_min, shifted[:, 1].min())
            ys_max = max(ys_max, shifted[:, 1].max())
        pen += g.advance_width

    if not polylines:
        raise EmptyRendering("no ink: all glyphs empty")

    pad = padding_frac * em_px
    width = max(1, math.ceil(xs_max - xs_min + 2 * pad))
    height = max(1, math.ceil(ys_max - ys_min + 2 * pad))
    # Glyph space is y-up; image rows grow downward.
    placed = [
        np.column_stack([p[:, 0] - xs_min + pad, (ys_max + pad) - p[:, 1]])
        for p in polylines
    ]
    coverage = fill_coverage(placed, width, height)
    if not (coverage > 0).any():
        raise EmptyRendering("rasterization produced all-zero coverage")
    layout = TextLayout(
        canvas_w=width,
        canvas_h=height,
        pen_positions=pens,
        advances=[g.advance_width for g in outlines],
        ink_bbox=ink_bbox(coverage),
    )
    return coverage, layout
