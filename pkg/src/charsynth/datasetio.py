"""On-disk dataset layout and metadata.

A dataset directory holds `data/` (PNG images) and `label/raw_labels.csv`
(one row per image: the label plus every applied nuisance value). Also here:
alphabet files, per-alphabet font index building, and the class split rule.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import unicodedata
from dataclasses import dataclass

import numpy as np

from charsynth.errors import (
    ConfigRangeError,
    DuplicateName,
    MissingImage,
    SchemaError,
    TooFewClasses,
)
from charsynth.fontio.parser import FontFace, coverage, parse_font
from charsynth.pipeline import ImageRecord
from charsynth.pngio import write_png

logger = logging.getLogger(__name__)

MANDATORY_COLUMNS = (
    "image_name",
    "text",
    "unicode_code_point",
    "font_file",
    "background",
    "font_weight",
    "margin_bottom",
    "margin_left",
    "margin_right",
    "margin_top",
    "family_name",
    "style_name",
)

Z_COLUMNS = (
    "super_class",
    "z_seed",
    "z_image_mode",
    "z_elastic_k",
    "z_linear_rotation",
    "z_linear_shear_x",
    "z_linear_shear_y",
    "z_linear_stretch_x",
    "z_linear_stretch_y",
    "z_proportion_ascender_delta",
    "z_proportion_descender_delta",
    "z_perspective_pull",
    "z_postelastic_amplitude",
    "z_postelastic_sigma",
    "z_foreground_color",
    "z_foreground_texture",
    "z_outline_width",
    "z_outline_color",
    "z_background_color",
    "z_background_polygon",
    "z_background_crop",
    "z_background_texture",
    "z_blend",
    "z_photometric_contrast",
    "z_photometric_brightness",
    "z_photometric_color",
    "z_photometric_sharpness",
    "z_blur_sigma",
)

ALL_COLUMNS = MANDATORY_COLUMNS + Z_COLUMNS


def _fmt_color(color) -> str:
    return "" if color is None else ",".join(str(c) for c in color)


def record_to_row(record: ImageRecord) -> dict:
    """Flatten an ImageRecord into the CSV row dict."""
    z = record.z
    if z.stroke_op:
        font_weight = f"{z.stroke_op}:{z.stroke_kernel}px"
    else:
        font_weight = "normal"
    top, left, right, bottom = z.margins
    row = {
        "image_name": record.image_name,
        "text": record.label.text,
        "unicode_code_point": "+".join(str(cp) for cp in record.label.codepoints),
        "font_file": z.font_file,
        "background": z.background.describe(),
        "font_weight": font_weight,
        "margin_bottom": repr(bottom),
        "margin_left": repr(left),
        "margin_right": repr(right),
        "margin_top": repr(top),
        "family_name": record.family_name,
        "style_name": record.style_name,
        "super_class": record.label.super_class,
        "z_seed": str(z.seed),
        "z_image_mode": z.image_mode,
        "z_elastic_k": str(z.elastic_k),
        "z_linear_rotation": repr(z.linear.theta),
        "z_linear_shear_x": repr(z.linear.lambda1),
        "z_linear_shear_y": repr(z.linear.lambda2),
        "z_linear_stretch_x": repr(z.linear.s1),
        "z_linear_stretch_y": repr(z.linear.s2),
        "z_proportion_ascender_delta": repr(z.proportion.ascender_delta) if z.proportion else "",
        "z_proportion_descender_delta": repr(z.proportion.descender_delta) if z.proportion else "",
        "z_perspective_pull": json.dumps(z.perspective_pull) if z.perspective_pull else "",
        "z_postelastic_amplitude": repr(z.postelastic[0]) if z.postelastic else "",
        "z_postelastic_sigma": repr(z.postelastic[1]) if z.postelastic else "",
        "z_foreground_color": _fmt_color(z.foreground.get("color")),
        "z_foreground_texture": z.foreground.get("texture_name", ""),
        "z_outline_width": str(z.outline["width"]) if z.outline else "",
        "z_outline_color": _fmt_color(z.outline["color"]) if z.outline else "",
        "z_background_color": _fmt_color(z.background.color if z.background.kind in ("color", "polygon") else None),
        "z_background_polygon": json.dumps(z.background.polygon) if z.background.polygon else "",
        "z_background_crop": json.dumps(z.background.crop) if z.background.crop else "",
        "z_background_texture": z.background.texture_name,
        "z_blend": z.blend,
        "z_photometric_contrast": repr(z.photometric["contrast"]) if z.photometric else "",
        "z_photometric_brightness": repr(z.photometric["brightness"]) if z.photometric else "",
        "z_photometric_color": repr(z.photometric["color"]) if z.photometric else "",
        "z_photometric_sharpness": repr(z.photometric["sharpness"]) if z.photometric else "",
        "z_blur_sigma": repr(z.blur_sigma),
    }
    return row


@dataclass
class DatasetLayout:
    root: str

    @property
    def data_dir(self) -> str:
        return os.path.join(self.root, "data")

    @property
    def csv_path(self) -> str:
        return os.path.join(self.root, "label", "raw_labels.csv")


def write_dataset(items, out_dir: str) -> DatasetLayout:
    """Write (ImageRecord, image array) pairs as PNGs plus raw_labels.csv.

    Rows are sorted by image_name; the CSV is RFC-4180 quoted UTF-8. Output
    is byte-identical across reruns with identical inputs.
    """
    layout = DatasetLayout(out_dir)
    os.makedirs(layout.data_dir, exist_ok=True)
    os.makedirs(os.path.dirname(layout.csv_path), exist_ok=True)
    rows = []
    seen = set()
    for record, img in items:
        if not record.image_name:
            raise ValueError("record has no image_name")
        if record.image_name in seen:
            raise DuplicateName(record.image_name)
        seen.add(record.image_name)
        with open(os.path.join(layout.data_dir, record.image_name), "wb") as fh:
            fh.write(img if isinstance(img, bytes) else write_png(img))
        rows.append(record_to_row(record))
    rows.sort(key=lambda r: r["image_name"])
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=ALL_COLUMNS, lineterminator="\r\n")
    writer.writeheader()
    writer.writerows(rows)
    with open(layout.csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    return layout


def read_rows(dataset_dir: str) -> list[dict]:
    layout = DatasetLayout(dataset_dir)
    if not os.path.isfile(layout.csv_path):
        raise SchemaError(f"missing {layout.csv_path}")
    with open(layout.csv_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in MANDATORY_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"missing mandatory columns: {missing}")
        return list(reader)


def validate_dataset(dataset_dir: str) -> dict:
    """Read-back check: schema, row/file agreement, resolvable images."""
    layout = DatasetLayout(dataset_dir)
    rows = read_rows(dataset_dir)
    if not os.path.isdir(layout.data_dir):
        raise SchemaError(f"missing {layout.data_dir}")
    files = {f for f in os.listdir(layout.data_dir) if f.endswith(".png")}
    names = [r["image_name"] for r in rows]
    if len(set(names)) != len(names):
        raise SchemaError("duplicate image_name rows")
    for name in names:
        if name not in files:
            raise MissingImage(name)
    if len(files) != len(rows):
        raise SchemaError(f"{len(files)} images but {len(rows)} CSV rows")
    return {"rows": len(rows), "images": len(files)}


@dataclass
class AlphabetEntry:
    text: str
    codepoints: tuple[int, ...]
    super_class: str


def parse_alphabet(text: str) -> list[AlphabetEntry]:
    """One NFC code point per line (hex like 0x41 / U+0041, or the literal
    character); `#` comments; optional `super_class=` section headers."""
    entries = []
    super_class = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("super_class="):
            super_class = line.split("=", 1)[1].strip()
            continue
        if line.lower().startswith(("0x", "u+")):
            cp = int(line[2:], 16)
            ch = chr(cp)
        else:
            ch = line
        nfc = unicodedata.normalize("NFC", ch)
        for c in nfc:
            if unicodedata.category(c) == "Cn":
                raise ConfigRangeError(
                    f"line {lineno}: U+{ord(c):04X} is not an assigned character"
                )
        entries.append(
            AlphabetEntry(text=nfc, codepoints=tuple(ord(c) for c in nfc), super_class=super_class)
        )
    if not entries:
        raise ConfigRangeError("alphabet file contains no characters")
    return entries


@dataclass
class AlphabetIndex:
    """An alphabet plus the fonts that support every character in it."""

    name: str
    entries: list[AlphabetEntry]
    fonts: list[str]

    def to_json(self) -> str:
        return json.dumps(
            {
                "alphabet": self.name,
                "entries": [
                    {"text": e.text, "codepoints": list(e.codepoints), "super_class": e.super_class}
                    for e in self.entries
                ],
                "fonts": self.fonts,
            },
            ensure_ascii=False,
            indent=2,
        )

    @staticmethod
    def from_json(text: str) -> "AlphabetIndex":
        data = json.loads(text)
        entries = [
            AlphabetEntry(e["text"], tuple(e["codepoints"]), e.get("super_class", ""))
            for e in data["entries"]
        ]
        return AlphabetIndex(data["alphabet"], entries, list(data["fonts"]))


def load_fonts_dir(fonts_dir: str) -> dict[str, FontFace]:
    """Parse every font file in the directory; failures are skipped and logged."""
    faces: dict[str, FontFace] = {}
    for name in sorted(os.listdir(fonts_dir)):
        if not name.lower().endswith((".ttf", ".otf")):
            continue
        path = os.path.join(fonts_dir, name)
        try:
            with open(path, "rb") as fh:
                faces[name] = parse_font(fh.read())
        except Exception as exc:  # noqa: BLE001 - error-isolation contract
            logger.warning("skipping font %s: %s", name, exc)
    return faces


def build_index(fonts_dir: str, entries: list[AlphabetEntry], name: str = "alphabet") -> AlphabetIndex:
    """Fonts (sorted by file name) that cover every character of the alphabet."""
    if not entries:
        raise ConfigRangeError("empty alphabet")
    cps = sorted({cp for e in entries for cp in e.codepoints})
    supporting = []
    for font_name, face in load_fonts_dir(fonts_dir).items():
        try:
            if coverage(face, cps):
                supporting.append(font_name)
        except Exception as exc:  # noqa: BLE001
            logger.warning("coverage check failed for %s: %s", font_name, exc)
    return AlphabetIndex(name=name, entries=list(entries), fonts=supporting)


def _round_half_up(num: int, den: int) -> int:
    return (2 * num + den) // (2 * den)


def split_classes(classes: list) -> tuple[list, list, list]:
    """Partition ordered classes into meta-train/valid/test.

    1409 classes split exactly 900/149/360; other sizes use the same ratios
    with half-up rounding (at least 1 per split), remainder to meta-train.
    """
    n = len(classes)
    if n < 3:
        raise TooFewClasses(f"need at least 3 classes, got {n}")
    if n == 1409:
        n_valid, n_test = 149, 360
    else:
        n_valid = max(1, _round_half_up(n * 149, 1409))
        n_test = max(1, _round_half_up(n * 360, 1409))
    n_train = n - n_valid - n_test
    if n_train < 1:
        n_train, n_valid, n_test = 1, 1, n - 2
    train = list(classes[:n_train])
    valid = list(classes[n_train : n_train + n_valid])
    test = list(classes[n_train + n_valid :])
    return train, valid, test
