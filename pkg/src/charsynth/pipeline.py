"""Per-image synthesis: sample the nuisance realization Z, render the label
under Z through every stage, and emit the image plus its complete metadata.

Determinism contract: the per-image seed is a stable 64-bit hash of
(master_seed, class_index, instance_index), and every stage draws from its
own child stream keyed by the stage name, so results are independent of
generation order, parallelism, and of which other stages are enabled.
"""

from __future__ import annotations

import hashlib
import unicodedata
from dataclasses import dataclass, field

import numpy as np

from charsynth.color import RgbColor, sample_color_pair
from charsynth.composite import (
    BackgroundParams,
    BackgroundSpec,
    BlendReport,
    FillSpec,
    blend_naive,
    blend_poisson,
    make_background,
    resolve_background,
)
from charsynth.config import GeneratorConfig
from charsynth.errors import ConfigRangeError, OutOfBounds
from charsynth.fontio.parser import FontFace
from charsynth.imageops import (
    MorphKernel,
    adjust_image,
    make_displacement_field,
    morphology,
    solve_homography,
    warp_coverage,
    warp_coverage_elastic,
)
from charsynth.raster import (
    PreRasterBundle,
    gaussian_blur,
    plan_resize,
    render_text,
    run_resize,
)
from charsynth.vector import (
    ElasticParams,
    LinearTransformParams,
    ProportionParams,
    compose_linear,
)

OVERSAMPLE = 8  # high-resolution render = OVERSAMPLE * final size

_STAGES = (
    "font", "elastic", "linear", "proportion", "perspective", "stroke",
    "postelastic", "colors", "foreground", "outline", "background",
    "translation", "photometric", "blur",
)


def image_seed(master_seed: int, class_index: int, instance_index: int) -> int:
    """Stable 64-bit per-image seed, independent of generation order."""
    payload = f"{master_seed}:{class_index}:{instance_index}".encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def stage_rng(seed: int, stage: str) -> np.random.Generator:
    """Child stream for one stage, keyed by the stage name."""
    key = int.from_bytes(hashlib.sha256(stage.encode()).digest()[:8], "big")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, key])))


@dataclass(frozen=True)
class LabelSpec:
    """The Y realization: NFC code points, their text, and the super-class."""

    codepoints: tuple[int, ...]
    text: str
    super_class: str = ""

    def __post_init__(self):
        if not self.codepoints:
            raise ValueError("codepoints must be non-empty")
        nfc = unicodedata.normalize("NFC", self.text)
        if nfc != self.text or tuple(ord(c) for c in nfc) != tuple(self.codepoints):
            raise ValueError("text must be the NFC realization of the code points")

    @staticmethod
    def from_text(text: str, super_class: str = "") -> "LabelSpec":
        nfc = unicodedata.normalize("NFC", text)
        return LabelSpec(tuple(ord(c) for c in nfc), nfc, super_class)


@dataclass
class Assets:
    """Shared read-only inputs: parsed fonts and texture images by name."""

    fonts: dict[str, FontFace]
    textures: dict[str, np.ndarray] = field(default_factory=dict)

    def font_names(self) -> list[str]:
        return sorted(self.fonts)

    def texture_names(self) -> list[str]:
        return sorted(self.textures)


@dataclass
class NuisanceParams:
    """The complete Z realization for one image (becomes the CSV row)."""

    seed: int
    font_file: str
    margins: tuple[float, float, float, float]  # top, left, right, bottom
    image_mode: str
    elastic_k: int
    linear: LinearTransformParams
    proportion: ProportionParams | None
    perspective_pull: list[tuple[float, float]] | None  # inward pull per corner, fractional
    stroke_op: str | None
    stroke_kernel: int
    postelastic: tuple[float, float] | None  # amplitude, sigma (final-px scale)
    foreground: dict
    outline: dict | None
    background: BackgroundParams
    blend: str
    photometric: dict | None
    blur_sigma: float


@dataclass
class ImageRecord:
    """One dataset row: file name, label, and the flattened Z."""

    image_name: str
    label: LabelSpec
    z: NuisanceParams
    family_name: str = ""
    style_name: str = ""
    blend_report: BlendReport | None = None


def _uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    if lo > hi:
        raise ConfigRangeError(f"inverted interval ({lo}, {hi})")
    if lo == hi:
        return float(lo)
    return float(rng.uniform(lo, hi))


def sample_nuisance(
    config: GeneratorConfig,
    class_index: int,
    instance_index: int,
    master_seed: int,
    assets: Assets,
) -> NuisanceParams:
    """Draw every enabled nuisance dimension uniformly from its interval."""
    config.validate()
    seed = image_seed(master_seed, class_index, instance_index)

    font_names = assets.font_names()
    if not font_names:
        raise ConfigRangeError("no fonts available")
    if config.font_mode == "fixed":
        font_file = config.font_file or font_names[0]
        if font_file not in assets.fonts:
            raise ConfigRangeError(f"font_file {font_file!r} not in the registry")
    else:
        rng = stage_rng(seed, "font")
        font_file = font_names[int(rng.integers(0, len(font_names)))]
    face = assets.fonts[font_file]

    elastic_k = round(config.elastic_k_frac * face.units_per_em) if config.elastic else 0

    rng = stage_rng(seed, "linear")
    theta = _uniform(rng, *config.rotation_range) if config.rotation else 0.0
    lambda1 = _uniform(rng, *config.shear_range) if config.shear else 0.0
    lambda2 = _uniform(rng, *config.shear_y_range) if config.shear_y else 0.0
    s1 = _uniform(rng, *config.stretch_x_range) if config.stretch else 1.0
    s2 = _uniform(rng, *config.stretch_y_range) if config.stretch else 1.0
    linear = LinearTransformParams(theta=theta, lambda1=lambda1, lambda2=lambda2, s1=s1, s2=s2)

    proportion = None
    if config.proportion:
        rng = stage_rng(seed, "proportion")
        proportion = ProportionParams(
            ascender_delta=_uniform(rng, *config.proportion_range),
            descender_delta=_uniform(rng, *config.proportion_range),
            ascender_threshold=0.8 * face.ascender,
            descender_threshold=0.8 * face.descender,
        )

    perspective_pull = None
    if config.perspective:
        rng = stage_rng(seed, "perspective")
        jitter = config.perspective_jitter
        perspective_pull = [
            (_uniform(rng, 0.0, jitter), _uniform(rng, 0.0, jitter)) for _ in range(4)
        ]

    stroke_op = None
    stroke_kernel = 0
    if config.stroke:
        rng = stage_rng(seed, "stroke")
        amount = round(_uniform(rng, *config.stroke_range))
        if amount:
            stroke_op = "erosion" if amount < 0 else "dilation"
            stroke_kernel = 2 * abs(int(amount)) + 1

    postelastic = None
    if config.postelastic:
        rng = stage_rng(seed, "postelastic")
        amplitude = _uniform(rng, *config.postelastic_amplitude_range)
        postelastic = (amplitude, config.postelastic_sigma)

    fg_needs_color = config.foreground == "color"
    bg_needs_color = config.background in ("color", "polygon")
    fg_color = bg_color = None
    rng = stage_rng(seed, "colors")
    if fg_needs_color and bg_needs_color:
        fg_rgb, bg_rgb = sample_color_pair(rng, config.deltae_threshold)
        fg_color, bg_color = fg_rgb.as_tuple(), bg_rgb.as_tuple()
    elif fg_needs_color:
        fg_color = tuple(int(v) for v in rng.integers(0, 256, 3))
    elif bg_needs_color:
        bg_color = tuple(int(v) for v in rng.integers(0, 256, 3))

    rng = stage_rng(seed, "foreground")
    if config.foreground == "texture":
        names = assets.texture_names()
        if not names:
            raise ConfigRangeError("foreground=texture requires texture_dir images")
        name = names[int(rng.integers(0, len(names)))]
        tex = assets.textures[name]
        th, tw = tex.shape[:2]
        if th < config.size or tw < config.size:
            raise ConfigRangeError(f"texture {name} smaller than the image size")
        origin = (
            int(rng.integers(0, th - config.size + 1)),
            int(rng.integers(0, tw - config.size + 1)),
        )
        foreground = {"kind": "texture", "texture_name": name, "crop_origin": origin}
    elif config.foreground == "color":
        foreground = {"kind": "uniform", "color": fg_color}
    else:
        foreground = {"kind": "uniform", "color": (0, 0, 0)}

    outline = None
    if config.outline:
        rng = stage_rng(seed, "outline")
        width = max(1, round(_uniform(rng, *config.outline_width_range)))
        outline = {"width": width, "color": tuple(int(v) for v in rng.integers(0, 256, 3))}

    rng = stage_rng(seed, "background")
    if config.background == "texture":
        names = assets.texture_names()
        if not names:
            raise ConfigRangeError("background=texture requires texture_dir images")
        name = names[int(rng.integers(0, len(names)))]
        spec = BackgroundSpec(kind="texture", texture=assets.textures[name], texture_name=name)
    elif config.background == "white":
        spec = BackgroundSpec(kind="white")
    else:
        spec = BackgroundSpec(kind=config.background, color=RgbColor(*bg_color))
    background = resolve_background(spec, config.size, config.size, rng)
    background.texture = None  # keep the record lightweight; reattached on use

    margins = list(config.margins)
    if config.translation and config.translation_amount > 0:
        rng = stage_rng(seed, "translation")
        top, left, right, bottom = margins
        max_dx = min(config.translation_amount, left, right)
        max_dy = min(config.translation_amount, top, bottom)
        dx = _uniform(rng, -max_dx, max_dx)
        dy = _uniform(rng, -max_dy, max_dy)
        margins = [top + dy, left + dx, right - dx, bottom - dy]

    photometric = None
    if config.photometric:
        rng = stage_rng(seed, "photometric")
        photometric = {
            "contrast": _uniform(rng, *config.contrast_range),
            "brightness": _uniform(rng, *config.brightness_range),
            "color": _uniform(rng, *config.color_enhance_range),
            "sharpness": _uniform(rng, *config.sharpness_range),
        }

    blur_sigma = 0.0
    if config.blur:
        rng = stage_rng(seed, "blur")
        blur_sigma = _uniform(rng, *config.blur_sigma_range)

    return NuisanceParams(
        seed=seed,
        font_file=font_file,
        margins=tuple(margins),
        image_mode=config.image_mode,
        elastic_k=elastic_k,
        linear=linear,
        proportion=proportion,
        perspective_pull=perspective_pull,
        stroke_op=stroke_op,
        stroke_kernel=stroke_kernel,
        postelastic=postelastic,
        foreground=foreground,
        outline=outline,
        background=background,
        blend=config.blend,
        photometric=photometric,
        blur_sigma=blur_sigma,
    )


def image_mode(img: np.ndarray, mode: str) -> np.ndarray:
    """RGB passthrough, luminance grayscale, or binary threshold at 128."""
    if mode == "RGB":
        return img
    if img.ndim != 3:
        raise ValueError("expected an RGB image")
    gray = np.clip(
        np.floor(
            img[..., 0] * 0.299 + img[..., 1] * 0.587 + img[..., 2] * 0.114 + 0.5
        ),
        0,
        255,
    ).astype(np.uint8)
    if mode == "grayscale":
        return gray
    if mode == "binary":
        return np.where(gray >= 128, 255, 0).astype(np.uint8)
    raise ValueError(f"unknown image mode {mode!r}")


def _fill_spec_from_record(record: dict, assets: Assets) -> FillSpec:
    if record["kind"] == "uniform":
        return FillSpec(kind="uniform", color=RgbColor(*record["color"]))
    return FillSpec(
        kind="texture",
        texture=assets.textures[record["texture_name"]],
        crop_origin=tuple(record["crop_origin"]),
        texture_name=record["texture_name"],
    )


def synthesize(
    assets: Assets, label: LabelSpec, z: NuisanceParams, size: int
) -> tuple[np.ndarray, ImageRecord]:
    """Render one image under Z.

    Stage order: glyph load -> elastic -> proportion -> scale to grid ->
    linear -> rasterize -> stroke morphology, perspective, and elastic field
    at high resolution -> Gaussian + integer reduction + Lanczos into the
    margin box -> foreground fill and outline -> background -> blend at the
    margin position -> whole-image photometrics and blur -> image mode.
    """
    face = assets.fonts[z.font_file]
    em_px = OVERSAMPLE * size

    pre = PreRasterBundle(
        elastic=(
            ElasticParams(magnitude_k=z.elastic_k, seed=stage_seed(z.seed, "elastic"))
            if z.elastic_k > 0
            else None
        ),
        proportion=z.proportion,
        linear=compose_linear(z.linear),
    )
    coverage, _layout = render_text(face, label.codepoints, pre, em_px)

    if z.stroke_op:
        k_hi = z.stroke_kernel * OVERSAMPLE + 1
        coverage = morphology(coverage, z.stroke_op, MorphKernel("ellipse", k_hi, k_hi))
        coverage = np.clip(coverage, 0.0, 1.0)

    if z.perspective_pull is not None:
        hh, ww = coverage.shape
        src = [(0.0, 0.0), (ww - 1.0, 0.0), (ww - 1.0, hh - 1.0), (0.0, hh - 1.0)]
        pulls = z.perspective_pull
        dst = [
            (pulls[0][0] * ww, pulls[0][1] * hh),
            (ww - 1 - pulls[1][0] * ww, pulls[1][1] * hh),
            (ww - 1 - pulls[2][0] * ww, hh - 1 - pulls[2][1] * hh),
            (pulls[3][0] * ww, hh - 1 - pulls[3][1] * hh),
        ]
        coverage = warp_coverage(coverage, solve_homography(src, dst))

    if z.postelastic is not None:
        amplitude, sigma = z.postelastic
        field_ = make_displacement_field(
            coverage.shape,
            amplitude * OVERSAMPLE,
            sigma * OVERSAMPLE,
            stage_seed(z.seed, "postelastic_field"),
        )
        coverage = warp_coverage_elastic(coverage, field_)

    top, left, right, bottom = z.margins
    left_px = round(left * size)
    right_px = round(right * size)
    top_px = round(top * size)
    bottom_px = round(bottom * size)
    content_w = max(1, size - left_px - right_px)
    content_h = max(1, size - top_px - bottom_px)
    hh, ww = coverage.shape
    fit = min(content_w / ww, content_h / hh)
    target_w = max(1, round(ww * fit))
    target_h = max(1, round(hh * fit))
    coverage = run_resize(coverage, plan_resize(ww, hh, target_w, target_h))

    layer = _apply_fills(coverage, z, assets)

    background = _background_with_texture(z.background, assets)
    bg = make_background(background, size, size)
    pos_x = left_px + (content_w - target_w) // 2
    pos_y = top_px + (content_h - target_h) // 2
    report = None
    if z.blend == "poisson":
        pos_x = min(max(pos_x, 1), size - target_w - 1)
        pos_y = min(max(pos_y, 1), size - target_h - 1)
        if pos_x < 1 or pos_y < 1:
            raise OutOfBounds("margins too small for seamless blending")
        img, report = blend_poisson(layer, bg, (pos_x, pos_y))
    else:
        img = blend_naive(layer, bg, (pos_x, pos_y))

    if z.photometric is not None:
        img = adjust_image(img, **z.photometric)
    if z.blur_sigma > 0:
        blurred = gaussian_blur(img.astype(np.float64), z.blur_sigma)
        img = np.clip(np.floor(blurred + 0.5), 0, 255).astype(np.uint8)

    img = image_mode(img, z.image_mode)
    record = ImageRecord(
        image_name="",
        label=label,
        z=z,
        family_name=face.family_name,
        style_name=face.style_name,
        blend_report=report,
    )
    return img, record


def _apply_fills(coverage: np.ndarray, z: NuisanceParams, assets: Assets):
    from charsynth.composite import add_outline, fill_foreground

    layer = fill_foreground(coverage, _fill_spec_from_record(z.foreground, assets))
    if z.outline is not None:
        spec = FillSpec(kind="uniform", color=RgbColor(*z.outline["color"]))
        layer = add_outline(layer, z.outline["width"], spec)
    return layer


def _background_with_texture(params: BackgroundParams, assets: Assets) -> BackgroundParams:
    if params.kind != "texture" or params.texture is not None:
        return params
    return BackgroundParams(
        kind=params.kind,
        color=params.color,
        polygon=params.polygon,
        crop=params.crop,
        texture_name=params.texture_name,
        texture=assets.textures[params.texture_name],
    )


def stage_seed(seed: int, stage: str) -> int:
    """64-bit child seed for stages that need a scalar seed."""
    key = hashlib.sha256(f"{seed}:{stage}".encode()).digest()[:8]
    return int.from_bytes(key, "big")
