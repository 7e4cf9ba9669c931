"""Generator configuration: one flat key per nuisance dimension, plus the
named presets (meta1..meta5 and the two regression variants).

The on-disk form is a plain text document of `key = value` lines with `#`
comments. Unknown keys are errors. Every key maps one-to-one to a CLI flag.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from charsynth.errors import ConfigRangeError, UnknownPreset

_MODES = {
    "image_mode": ("RGB", "grayscale", "binary"),
    "font_mode": ("fixed", "sampled"),
    "foreground": ("black", "color", "texture"),
    "background": ("white", "color", "polygon", "texture"),
    "blend": ("naive", "poisson"),
}


@dataclass(frozen=True)
class GeneratorConfig:
    # canvas
    size: int = 32
    image_mode: str = "RGB"
    margins: tuple[float, float, float, float] = (0.08, 0.08, 0.08, 0.08)  # top,left,right,bottom
    translation: bool = False
    translation_amount: float = 0.0  # max fractional shift of the content box
    padding_frac: float = 0.05
    # fonts
    font_mode: str = "fixed"
    font_file: str = ""  # resolved to the first indexed font when empty
    # pre-rasterization
    elastic: bool = False
    elastic_k_frac: float = 0.02  # k = round(frac * units_per_em)
    rotation: bool = False
    rotation_range: tuple[float, float] = (-30.0, 30.0)
    shear: bool = False  # horizontal
    shear_range: tuple[float, float] = (-0.8, 0.8)
    shear_y: bool = False
    shear_y_range: tuple[float, float] = (-0.3, 0.3)
    stretch: bool = False
    stretch_x_range: tuple[float, float] = (0.8, 1.25)
    stretch_y_range: tuple[float, float] = (0.8, 1.25)
    proportion: bool = False
    proportion_range: tuple[float, float] = (-100.0, 100.0)  # font units
    # post-rasterization
    perspective: bool = False
    perspective_jitter: float = 0.15
    stroke: bool = False
    stroke_range: tuple[float, float] = (-2.0, 2.0)  # <0 erode, >0 dilate (final px)
    postelastic: bool = False
    postelastic_amplitude_range: tuple[float, float] = (0.0, 2.0)
    postelastic_sigma: float = 2.0
    blur: bool = False
    blur_sigma_range: tuple[float, float] = (0.0, 1.0)
    photometric: bool = False
    contrast_range: tuple[float, float] = (0.7, 1.3)
    brightness_range: tuple[float, float] = (0.7, 1.3)
    color_enhance_range: tuple[float, float] = (0.7, 1.3)
    sharpness_range: tuple[float, float] = (0.5, 1.5)
    # compositing
    foreground: str = "black"
    deltae_threshold: float = 20.0
    outline: bool = False
    outline_width_range: tuple[float, float] = (1.0, 2.0)
    background: str = "white"
    blend: str = "naive"
    texture_dir: str = ""

    def validate(self) -> "GeneratorConfig":
        if self.size < 4:
            raise ConfigRangeError("size must be at least 4")
        for name, choices in _MODES.items():
            if getattr(self, name) not in choices:
                raise ConfigRangeError(f"{name} must be one of {choices}")
        if len(self.margins) != 4 or any(not 0 <= m < 0.5 for m in self.margins):
            raise ConfigRangeError("margins must be four fractions in [0, 0.5)")
        top, left, right, bottom = self.margins
        if left + right >= 1 or top + bottom >= 1:
            raise ConfigRangeError("opposing margins must sum below 1")
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name.endswith("_range"):
                lo, hi = value
                if not lo <= hi:
                    raise ConfigRangeError(f"{f.name} is inverted: {value}")
        if self.elastic_k_frac < 0 or self.perspective_jitter < 0 or self.deltae_threshold < 0:
            raise ConfigRangeError("fractions and thresholds must be >= 0")
        if not 0 <= self.translation_amount < 0.5:
            raise ConfigRangeError("translation_amount must be in [0, 0.5)")
        return self


_FIELDS = {f.name: f for f in fields(GeneratorConfig)}


def _parse_value(name: str, raw: str):
    f = _FIELDS[name]
    raw = raw.strip()
    if f.type == "bool":
        if raw.lower() in ("on", "true", "1", "yes"):
            return True
        if raw.lower() in ("off", "false", "0", "no"):
            return False
        raise ConfigRangeError(f"{name}: expected on/off, got {raw!r}")
    if f.type == "int":
        return int(raw)
    if f.type == "float":
        return float(raw)
    if f.type == "str":
        return raw
    parts = [p for p in raw.replace(",", " ").split() if p]
    values = tuple(float(p) for p in parts)
    expected = 4 if name == "margins" else 2
    if len(values) != expected:
        raise ConfigRangeError(f"{name}: expected {expected} numbers, got {raw!r}")
    return values


def parse_config_text(text: str, base: GeneratorConfig | None = None) -> GeneratorConfig:
    """Parse `key = value` lines over a base config. Unknown keys are errors."""
    cfg = base or GeneratorConfig()
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigRangeError(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _FIELDS:
            raise ConfigRangeError(f"line {lineno}: unknown key {key!r}")
        overrides[key] = _parse_value(key, raw)
    return replace(cfg, **overrides).validate()


def config_to_text(cfg: GeneratorConfig) -> str:
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, bool):
            rendered = "on" if value else "off"
        elif isinstance(value, tuple):
            rendered = ",".join(repr(v) for v in value)
        else:
            rendered = str(value)
        lines.append(f"{f.name} = {rendered}")
    return "\n".join(lines) + "\n"


def apply_overrides(cfg: GeneratorConfig, overrides: dict) -> GeneratorConfig:
    unknown = set(overrides) - set(_FIELDS)
    if unknown:
        raise ConfigRangeError(f"unknown config keys: {sorted(unknown)}")
    return replace(cfg, **overrides).validate()


_BASE = GeneratorConfig(elastic=True, font_mode="fixed")

PRESETS: dict[str, GeneratorConfig] = {
    "meta1": _BASE,
    "meta2": replace(_BASE, font_mode="sampled"),
    "meta3": replace(
        _BASE,
        font_mode="sampled",
        rotation=True,
        rotation_range=(-30.0, 30.0),
        shear=True,
        shear_range=(-0.8, 0.8),
        perspective=True,
    ),
    "meta4": replace(
        _BASE,
        font_mode="sampled",
        rotation=True,
        rotation_range=(-30.0, 30.0),
        shear=True,
        shear_range=(-0.8, 0.8),
        perspective=True,
        foreground="color",
        background="color",
    ),
    "meta5": replace(
        _BASE,
        font_mode="sampled",
        rotation=True,
        rotation_range=(-30.0, 30.0),
        shear=True,
        shear_range=(-0.8, 0.8),
        perspective=True,
        foreground="color",
        background="texture",
        blend="poisson",
    ),
    "shear-regression": replace(
        _BASE,
        font_mode="sampled",
        shear=True,
        shear_range=(-0.8, 0.8),
    ),
    "rotation-regression": replace(
        _BASE,
        font_mode="sampled",
        rotation=True,
        rotation_range=(-60.0, 60.0),
    ),
}


def preset(name: str) -> GeneratorConfig:
    """A named config bundle; meta presets are cumulative in their transforms."""
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
