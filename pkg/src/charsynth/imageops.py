"""Post-rasterization transforms applied jointly to an image and its mask:
perspective warp, the seven morphological operators, photometric
adjustments, and displacement-field elastic distortion.

A RasterLayer couples an RGB image with its [0, 1] foreground mask; every
geometric op here moves both through the identical map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from charsynth import kernels
from charsynth.errors import DegenerateCorrespondence
from charsynth.kernels.plans import gaussian_kernel

WHITE = (255.0, 255.0, 255.0)
LUMA = (0.299, 0.587, 0.114)  # ITU-R 601 weights, shared with image_mode
_SMOOTH_KERNEL = np.array([1.0, 1.0, 1.0]) / 3.0  # separable 3x3 box for the sharpness baseline


@dataclass
class RasterLayer:
    """Foreground image plus its mask (1 = text), same dimensions."""

    image: np.ndarray  # (h, w, 3) uint8
    mask: np.ndarray  # (h, w) float64 in [0, 1]

    def __post_init__(self):
        if self.image.shape[:2] != self.mask.shape:
            raise ValueError("image and mask dimensions differ")

    def copy(self) -> "RasterLayer":
        return RasterLayer(self.image.copy(), self.mask.copy())


@dataclass(frozen=True)
class Homography:
    """3x3 projective map with h[2][2] normalized to 1."""

    h: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.h, dtype=np.float64)
        if m.shape != (3, 3):
            raise ValueError("homography must be 3x3")
        if abs(np.linalg.det(m)) <= 1e-12:
            raise DegenerateCorrespondence("homography matrix is singular")
        object.__setattr__(self, "h", m / m[2, 2])

    def apply(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.float64)
        ones = np.ones((pts.shape[0], 1))
        proj = np.hstack([pts, ones]) @ self.h.T
        return proj[:, :2] / proj[:, 2:3]

    def inverse(self) -> "Homography":
        return Homography(np.linalg.inv(self.h))


def _no_collinear_triple(pts: np.ndarray) -> bool:
    for i in range(4):
        for j in range(i + 1, 4):
            for k in range(j + 1, 4):
                a, b, c = pts[i], pts[j], pts[k]
                area2 = abs(
                    (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
                )
                if area2 < 1e-9:
                    return False
    return True


def solve_homography(src, dst) -> Homography:
    """Exact 4-correspondence solve of the 8-unknown linear system."""
    src = np.asarray(src, dtype=np.float64).reshape(4, 2)
    dst = np.asarray(dst, dtype=np.float64).reshape(4, 2)
    if not _no_collinear_triple(src) or not _no_collinear_triple(dst):
        raise DegenerateCorrespondence("three correspondence points are collinear")
    rows = []
    rhs = []
    for (x, y), (u, v) in zip(src, dst):
        rows.append([x, y, 1, 0, 0, 0, -x * u, -y * u])
        rows.append([0, 0, 0, x, y, 1, -x * v, -y * v])
        rhs.extend([u, v])
    try:
        sol = np.linalg.solve(np.array(rows), np.array(rhs))
    except np.linalg.LinAlgError as exc:
        raise DegenerateCorrespondence("correspondence system is singular") from exc
    h = np.append(sol, 1.0).reshape(3, 3)
    homography = Homography(h)
    residual = np.max(np.linalg.norm(homography.apply(src) - dst, axis=1))
    if residual > 1e-6:
        raise DegenerateCorrespondence(f"solve residual {residual:g} exceeds 1e-6")
    return homography


def warp_perspective(layer: RasterLayer, h: Homography, fill=WHITE) -> RasterLayer:
    """Inverse-mapped bilinear warp of image and mask through the same H."""
    hh, ww = layer.mask.shape
    ys, xs = np.indices((hh, ww), dtype=np.float64)
    dst_pts = np.column_stack([xs.ravel(), ys.ravel()])
    src_pts = h.inverse().apply(dst_pts)
    map_x = src_pts[:, 0].reshape(hh, ww)
    map_y = src_pts[:, 1].reshape(hh, ww)
    img = kernels.bilinear_warp(layer.image.astype(np.float64), map_x, map_y, fill)
    mask = kernels.bilinear_warp(layer.mask, map_x, map_y, 0.0)
    return RasterLayer(
        image=np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8),
        mask=np.clip(mask, 0.0, 1.0),
    )


def warp_coverage(coverage: np.ndarray, h: Homography) -> np.ndarray:
    """Perspective warp of a bare coverage bitmap (outside reads as 0)."""
    hh, ww = coverage.shape
    ys, xs = np.indices((hh, ww), dtype=np.float64)
    pts = h.inverse().apply(np.column_stack([xs.ravel(), ys.ravel()]))
    out = kernels.bilinear_warp(
        coverage, pts[:, 0].reshape(hh, ww), pts[:, 1].reshape(hh, ww), 0.0
    )
    return np.clip(out, 0.0, 1.0)


@dataclass(frozen=True)
class MorphKernel:
    """Structuring element: rectangle, ellipse, or cross, with odd sides."""

    shape: str
    width: int
    height: int

    def __post_init__(self):
        if self.shape not in ("rectangle", "ellipse", "cross"):
            raise ValueError(f"unknown kernel shape {self.shape!r}")
        if self.width < 1 or self.height < 1 or self.width % 2 == 0 or self.height % 2 == 0:
            raise ValueError("kernel sides must be odd and positive")

    def offsets(self) -> np.ndarray:
        rx, ry = (self.width - 1) // 2, (self.height - 1) // 2
        cells = []
        for dy in range(-ry, ry + 1):
            for dx in range(-rx, rx + 1):
                if self.shape == "rectangle":
                    keep = True
                elif self.shape == "cross":
                    keep = dx == 0 or dy == 0
                else:  # ellipse
                    nx = dx / rx if rx else 0.0
                    ny = dy / ry if ry else 0.0
                    keep = (dx == 0 or rx > 0) and (dy == 0 or ry > 0) and nx * nx + ny * ny <= 1.0 + 1e-9
                if keep:
                    cells.append((dy, dx))
        return np.array(cells, dtype=np.int64)


MORPH_OPS = ("erosion", "dilation", "opening", "closing", "gradient", "tophat", "blackhat")


def morphology(img: np.ndarray, op_kind: str, kernel: MorphKernel) -> np.ndarray:
    """The seven morphological operators over [0, 1] images.

    Erosion is a min-filter and dilation a max-filter over the active kernel
    cells; cells outside the image read as background (0). Derived ops follow
    the set definitions, so blackhat can dip below 0 near borders.
    """
    img = np.asarray(img, dtype=np.float64)
    offsets = kernel.offsets()

    def erode(x):
        return kernels.minmax_filter(x, offsets, True)

    def dilate(x):
        return kernels.minmax_filter(x, offsets, False)

    if op_kind == "erosion":
        return erode(img)
    if op_kind == "dilation":
        return dilate(img)
    if op_kind == "opening":
        return dilate(erode(img))
    if op_kind == "closing":
        return erode(dilate(img))
    if op_kind == "gradient":
        return dilate(img) - erode(img)
    if op_kind == "tophat":
        return img - dilate(erode(img))
    if op_kind == "blackhat":
        return erode(dilate(img)) - img
    raise ValueError(f"unknown morphology op {op_kind!r}")


def _luminance(img: np.ndarray) -> np.ndarray:
    return img[..., 0] * LUMA[0] + img[..., 1] * LUMA[1] + img[..., 2] * LUMA[2]


def adjust_image(
    image: np.ndarray,
    contrast: float = 1.0,
    brightness: float = 1.0,
    color: float = 1.0,
    sharpness: float = 1.0,
) -> np.ndarray:
    """Photometric interpolation on an RGB uint8 image; factor 1 is identity.

    contrast pulls toward the mean luminance, brightness toward black, color
    toward the grayscale image, sharpness toward a 3x3 smoothed baseline.
    Applied in the order color, contrast, brightness, sharpness.
    """
    for name, factor in (("contrast", contrast), ("brightness", brightness),
                         ("color", color), ("sharpness", sharpness)):
        if factor < 0:
            raise ValueError(f"{name} factor must be >= 0")
    img = image.astype(np.float64)
    if color != 1.0:
        gray = _luminance(img)[..., None]
        img = gray + (img - gray) * color
    if contrast != 1.0:
        mean = _luminance(img).mean()
        img = mean + (img - mean) * contrast
    if brightness != 1.0:
        img = img * brightness
    if sharpness != 1.0:
        smooth = kernels.convolve_sep(img, _SMOOTH_KERNEL)
        img = smooth + (img - smooth) * sharpness
    return np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)


def adjust(
    layer: RasterLayer,
    contrast: float = 1.0,
    brightness: float = 1.0,
    color: float = 1.0,
    sharpness: float = 1.0,
) -> RasterLayer:
    """adjust_image on the layer's image; the mask is untouched (photometric
    ops move no pixels)."""
    return RasterLayer(
        image=adjust_image(layer.image, contrast, brightness, color, sharpness),
        mask=layer.mask.copy(),
    )


@dataclass
class DisplacementField:
    """Per-pixel source offsets generated from smoothed noise."""

    dx: np.ndarray
    dy: np.ndarray
    amplitude: float
    smoothing_sigma: float


def make_displacement_field(
    shape: tuple[int, int],
    amplitude: float,
    smoothing_sigma: float,
    seed: int,
    rng: np.random.Generator | None = None,
) -> DisplacementField:
    """amplitude * gaussian_blur(uniform(-1, 1) noise, smoothing_sigma)."""
    if amplitude < 0:
        raise ValueError("amplitude must be >= 0")
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    k = gaussian_kernel(smoothing_sigma)
    dx = amplitude * kernels.convolve_sep(rng.uniform(-1.0, 1.0, shape), k)
    dy = amplitude * kernels.convolve_sep(rng.uniform(-1.0, 1.0, shape), k)
    return DisplacementField(dx=dx, dy=dy, amplitude=amplitude, smoothing_sigma=smoothing_sigma)


def elastic_field_warp(layer: RasterLayer, field: DisplacementField) -> RasterLayer:
    """Move pixels by the displacement field (image and mask identically).

    Source coordinates are clamped to the image, so no fill color is
    introduced; amplitude 0 is an exact identity.
    """
    if field.dx.shape != layer.mask.shape:
        raise ValueError("field dimensions differ from the layer")
    if field.amplitude == 0:
        return layer.copy()
    hh, ww = layer.mask.shape
    ys, xs = np.indices((hh, ww), dtype=np.float64)
    map_x = np.clip(xs + field.dx, 0, ww - 1)
    map_y = np.clip(ys + field.dy, 0, hh - 1)
    img = kernels.bilinear_warp(layer.image.astype(np.float64), map_x, map_y, 0.0)
    mask = kernels.bilinear_warp(layer.mask, map_x, map_y, 0.0)
    return RasterLayer(
        image=np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8),
        mask=np.clip(mask, 0.0, 1.0),
    )


def warp_coverage_elastic(coverage: np.ndarray, field: DisplacementField) -> np.ndarray:
    """Displacement-field warp of a bare coverage bitmap."""
    if field.amplitude == 0:
        return coverage.copy()
    hh, ww = coverage.shape
    ys, xs = np.indices((hh, ww), dtype=np.float64)
    map_x = np.clip(xs + field.dx, 0, ww - 1)
    map_y = np.clip(ys + field.dy, 0, hh - 1)
    return np.clip(kernels.bilinear_warp(coverage, map_x, map_y, 0.0), 0.0, 1.0)
