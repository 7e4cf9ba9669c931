"""Foreground filling, text outline, background synthesis, and blending of
the foreground layer onto the background (naive paste or seamless Poisson)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from charsynth import kernels
from charsynth.color import RgbColor
from charsynth.errors import OutOfBounds, TextureTooSmall
from charsynth.imageops import MorphKernel, RasterLayer, morphology
from charsynth.raster import fill_coverage, lanczos_resize


class NonConvergenceWarning(UserWarning):
    """Poisson solve ended above tolerance; the result is still returned."""


def _round_u8(arr: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(arr + 0.5), 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class FillSpec:
    """Either a uniform color or a crop of a texture image."""

    kind: str  # "uniform" | "texture"
    color: RgbColor | None = None
    texture: np.ndarray | None = None  # (h, w, 3) uint8
    crop_origin: tuple[int, int] = (0, 0)  # (y, x)
    texture_name: str = ""

    def __post_init__(self):
        if self.kind == "uniform":
            if self.color is None or self.texture is not None:
                raise ValueError("uniform fill needs a color and no texture")
        elif self.kind == "texture":
            if self.texture is None or self.color is not None:
                raise ValueError("texture fill needs a texture and no color")
        else:
            raise ValueError(f"unknown fill kind {self.kind!r}")

    def values_for(self, h: int, w: int) -> np.ndarray:
        """Per-pixel fill values for an (h, w) region."""
        if self.kind == "uniform":
            return np.broadcast_to(
                np.array(self.color.as_tuple(), dtype=np.float64), (h, w, 3)
            )
        ty, tx = self.crop_origin
        th, tw = self.texture.shape[:2]
        if ty < 0 or tx < 0 or ty + h > th or tx + w > tw:
            raise TextureTooSmall(
                f"crop {h}x{w} at ({ty}, {tx}) exceeds texture {th}x{tw}"
            )
        return self.texture[ty : ty + h, tx : tx + w].astype(np.float64)


def fill_foreground(coverage: np.ndarray, spec: FillSpec) -> RasterLayer:
    """Fill coverage with the spec; coverage acts as alpha against white."""
    coverage = np.asarray(coverage, dtype=np.float64)
    h, w = coverage.shape
    values = spec.values_for(h, w)
    alpha = coverage[..., None]
    image = values * alpha + 255.0 * (1.0 - alpha)
    return RasterLayer(image=_round_u8(image), mask=coverage.copy())


def add_outline(layer: RasterLayer, width: int, spec: FillSpec) -> RasterLayer:
    """Add an outline of `width` px: the dilation ring around the mask,
    filled per spec; the mask grows to include it."""
    if width < 1:
        raise ValueError("outline width must be >= 1")
    side = 2 * width + 1
    kernel = MorphKernel("rectangle", side, side)
    dilated = morphology(layer.mask, "dilation", kernel)
    ring = np.clip(dilated - layer.mask, 0.0, 1.0)
    h, w = layer.mask.shape
    values = spec.values_for(h, w)
    image = values * ring[..., None] + layer.image.astype(np.float64) * (1.0 - ring[..., None])
    return RasterLayer(image=_round_u8(image), mask=np.maximum(layer.mask, dilated))


@dataclass(frozen=True)
class BackgroundSpec:
    """plain white, uniform color, color + random regular polygon, or a
    natural texture crop."""

    kind: str  # "white" | "color" | "polygon" | "texture"
    color: RgbColor | None = None
    polygon_color: RgbColor | None = None
    texture: np.ndarray | None = None
    texture_name: str = ""

    def __post_init__(self):
        if self.kind not in ("white", "color", "polygon", "texture"):
            raise ValueError(f"unknown background kind {self.kind!r}")
        if self.kind in ("color", "polygon") and self.color is None:
            raise ValueError(f"{self.kind} background needs a base color")
        if self.kind == "texture" and self.texture is None:
            raise ValueError("texture background needs a texture image")


@dataclass
class BackgroundParams:
    """Fully resolved background: every sampled value, ready to render and
    to be recorded as metadata."""

    kind: str
    color: tuple[int, int, int] = (255, 255, 255)
    polygon: dict | None = None  # n, cx, cy, radius, rotation_deg, color
    crop: tuple[int, int, int, int] | None = None  # y0, x0, h, w
    texture_name: str = ""
    texture: np.ndarray | None = field(default=None, repr=False)

    def describe(self) -> str:
        if self.kind == "white":
            return "white"
        if self.kind == "color":
            return f"color{self.color}"
        if self.kind == "polygon":
            return f"color{self.color}+polygon{self.polygon['n']}"
        return f"texture:{self.texture_name}"


def resolve_background(
    spec: BackgroundSpec, w: int, h: int, rng: np.random.Generator
) -> BackgroundParams:
    """Sample every free parameter of the background up front."""
    if spec.kind == "white":
        return BackgroundParams(kind="white")
    if spec.kind == "color":
        return BackgroundParams(kind="color", color=spec.color.as_tuple())
    if spec.kind == "polygon":
        n = int(rng.integers(3, 9))
        radius = float(rng.uniform(0.15, 0.4) * min(w, h))
        cx = float(rng.uniform(radius, w - radius))
        cy = float(rng.uniform(radius, h - radius))
        rotation = float(rng.uniform(0.0, 360.0))
        poly_color = (
            spec.polygon_color.as_tuple()
            if spec.polygon_color is not None
            else tuple(int(v) for v in rng.integers(0, 256, 3))
        )
        return BackgroundParams(
            kind="polygon",
            color=spec.color.as_tuple(),
            polygon={
                "n": n,
                "cx": cx,
                "cy": cy,
                "radius": radius,
                "rotation_deg": rotation,
                "color": poly_color,
            },
        )
    th, tw = spec.texture.shape[:2]
    if th < 8 or tw < 8:
        raise TextureTooSmall(f"texture {th}x{tw} smaller than 8x8")
    f = float(rng.uniform(0.3, 1.0))
    ch = max(8, int(f * th))
    cw = max(8, int(f * tw))
    y0 = int(rng.integers(0, th - ch + 1))
    x0 = int(rng.integers(0, tw - cw + 1))
    return BackgroundParams(
        kind="texture",
        crop=(y0, x0, ch, cw),
        texture_name=spec.texture_name,
        texture=spec.texture,
    )


def polygon_vertices(params: dict) -> np.ndarray:
    """Vertex positions of the resolved regular polygon."""
    n = params["n"]
    angles = np.radians(params["rotation_deg"]) + 2.0 * np.pi * np.arange(n) / n
    return np.column_stack(
        [
            params["cx"] + params["radius"] * np.cos(angles),
            params["cy"] + params["radius"] * np.sin(angles),
        ]
    )


def make_background(params: BackgroundParams, w: int, h: int) -> np.ndarray:
    """Render the resolved background to an (h, w, 3) uint8 image."""
    if params.kind == "white":
        return np.full((h, w, 3), 255, dtype=np.uint8)
    if params.kind == "color":
        return np.tile(np.array(params.color, dtype=np.uint8), (h, w, 1))
    if params.kind == "polygon":
        base = np.tile(np.array(params.color, dtype=np.float64), (h, w, 1))
        alpha = fill_coverage([polygon_vertices(params.polygon)], w, h)[..., None]
        poly = np.array(params.polygon["color"], dtype=np.float64)
        return _round_u8(poly * alpha + base * (1.0 - alpha))
    y0, x0, ch, cw = params.crop
    crop = params.texture[y0 : y0 + ch, x0 : x0 + cw].astype(np.float64)
    resized = lanczos_resize(crop, w, h, clamp=(0.0, 255.0))
    return _round_u8(resized)


def blend_naive(fg: RasterLayer, bg: np.ndarray, position: tuple[int, int]) -> np.ndarray:
    """Mask-weighted paste: out = mask*fg + (1-mask)*bg, rounded half-up."""
    x, y = position
    fh, fw = fg.mask.shape
    bh, bw = bg.shape[:2]
    if x < 0 or y < 0 or x + fw > bw or y + fh > bh:
        raise OutOfBounds(f"{fw}x{fh} layer at ({x}, {y}) exceeds {bw}x{bh} background")
    out = bg.astype(np.float64).copy()
    region = out[y : y + fh, x : x + fw]
    alpha = fg.mask[..., None]
    out[y : y + fh, x : x + fw] = fg.image.astype(np.float64) * alpha + region * (1.0 - alpha)
    return _round_u8(out)


@dataclass
class BlendReport:
    converged: bool
    iterations: int
    residual: float


def blend_poisson(
    fg: RasterLayer,
    bg: np.ndarray,
    position: tuple[int, int],
    tol: float = 1e-3,
    max_iters: int | None = None,
) -> tuple[np.ndarray, BlendReport]:
    """Seamless cloning: solve the discrete Poisson equation on the mask's
    pixels with Dirichlet boundary from the background and guidance from the
    foreground gradients. Channels are solved independently and clamped after
    each solve. On non-convergence the result is still returned, with a
    warning and a report flag."""
    x, y = position
    fh, fw = fg.mask.shape
    bh, bw = bg.shape[:2]
    if x < 1 or y < 1 or x + fw > bw - 1 or y + fh > bh - 1:
        raise OutOfBounds("blend region must keep a 1-px ring inside the background")
    omega = fg.mask > 0.5
    out = bg.copy()
    if not omega.any():
        return out, BlendReport(converged=True, iterations=0, residual=0.0)
    if max_iters is None:
        max_iters = 10 * int(omega.sum())

    interior = np.zeros((fh + 2, fw + 2), dtype=bool)
    interior[1:-1, 1:-1] = omega
    bg_pad = bg[y - 1 : y + fh + 1, x - 1 : x + fw + 1].astype(np.float64)
    fg_pad = np.pad(fg.image.astype(np.float64), ((1, 1), (1, 1), (0, 0)), mode="edge")

    report = BlendReport(converged=True, iterations=0, residual=0.0)
    solved = np.empty((fh, fw, 3), dtype=np.float64)
    for ch in range(3):
        src = fg_pad[:, :, ch]
        div = 4.0 * src - (
            np.roll(src, 1, axis=0)
            + np.roll(src, -1, axis=0)
            + np.roll(src, 1, axis=1)
            + np.roll(src, -1, axis=1)
        )
        u0 = bg_pad[:, :, ch].copy()
        u0[interior] = src[interior]
        u, iters, residual = kernels.poisson_iterate(u0, div, interior, tol, max_iters)
        solved[:, :, ch] = u[1:-1, 1:-1]
        report.iterations = max(report.iterations, iters)
        report.residual = max(report.residual, residual)
        if residual > tol:
            report.converged = False
    if not report.converged:
        warnings.warn(
            f"poisson blend residual {report.residual:g} above tol {tol:g}",
            NonConvergenceWarning,
        )
    region = out[y : y + fh, x : x + fw]
    region[omega] = _round_u8(solved)[omega]
    return out, report
