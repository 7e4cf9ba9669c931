"""Dataset generation orchestration: per-class/per-instance synthesis with
order-independent seeding, optional process parallelism, and a preview grid.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from charsynth.config import GeneratorConfig
from charsynth.datasetio import (
    AlphabetEntry,
    DatasetLayout,
    load_fonts_dir,
    write_dataset,
)
from charsynth.errors import ConfigRangeError
from charsynth.pipeline import Assets, LabelSpec, sample_nuisance, synthesize
from charsynth.pngio import read_png, write_png

try:  # reading user textures in arbitrary raster formats
    from PIL import Image as _PILImage
except ImportError:  # pragma: no cover
    _PILImage = None


def load_textures_dir(textures_dir: str) -> dict[str, np.ndarray]:
    textures: dict[str, np.ndarray] = {}
    if not textures_dir:
        return textures
    for name in sorted(os.listdir(textures_dir)):
        path = os.path.join(textures_dir, name)
        if not os.path.isfile(path):
            continue
        try:
            if name.lower().endswith(".png"):
                with open(path, "rb") as fh:
                    img = read_png(fh.read())
                if img.ndim == 2:
                    img = np.repeat(img[..., None], 3, axis=2)
            elif _PILImage is not None:
                img = np.asarray(_PILImage.open(path).convert("RGB"))
            else:
                continue
        except Exception:  # noqa: BLE001 - unreadable files are skipped
            continue
        textures[name] = img.astype(np.uint8)
    return textures


def load_assets(fonts_dir: str, textures_dir: str = "", font_names: list[str] | None = None) -> Assets:
    fonts = load_fonts_dir(fonts_dir)
    if font_names is not None:
        fonts = {name: fonts[name] for name in font_names if name in fonts}
    if not fonts:
        raise ConfigRangeError(f"no usable fonts in {fonts_dir!r}")
    return Assets(fonts=fonts, textures=load_textures_dir(textures_dir))


def image_name_for(class_index: int, instance_index: int) -> str:
    return f"{class_index:05d}_{instance_index:04d}.png"


def _render_one(assets, config, entry, class_index, instance_index, master_seed):
    label = LabelSpec(entry.codepoints, entry.text, entry.super_class)
    z = sample_nuisance(config, class_index, instance_index, master_seed, assets)
    img, record = synthesize(assets, label, z, config.size)
    record.image_name = image_name_for(class_index, instance_index)
    return record, write_png(img)


_WORKER_STATE: dict = {}


def _worker_init(fonts_dir, textures_dir, font_names, config):
    _WORKER_STATE["assets"] = load_assets(fonts_dir, textures_dir, font_names)
    _WORKER_STATE["config"] = config


def _worker_render(task):
    entry, class_index, instance_index, master_seed = task
    return _render_one(
        _WORKER_STATE["assets"],
        _WORKER_STATE["config"],
        entry,
        class_index,
        instance_index,
        master_seed,
    )


def generate_dataset(
    config: GeneratorConfig,
    entries: list[AlphabetEntry],
    fonts_dir: str,
    out_dir: str,
    count: int,
    master_seed: int,
    workers: int = 1,
    font_names: list[str] | None = None,
) -> DatasetLayout:
    """Synthesize count instances per class and write the dataset.

    Classes are ordered by ascending code point. Output is identical for any
    worker count: every image depends only on (config, master_seed, class
    index, instance index).
    """
    config.validate()
    if count < 1:
        raise ConfigRangeError("count must be >= 1")
    entries = sorted(entries, key=lambda e: e.codepoints)
    tasks = [
        (entry, class_index, instance_index, master_seed)
        for class_index, entry in enumerate(entries)
        for instance_index in range(count)
    ]
    if workers <= 1:
        assets = load_assets(fonts_dir, config.texture_dir, font_names)
        results = [_render_one(assets, config, *t[:3], master_seed) for t in tasks]
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_worker_init,
            initargs=(fonts_dir, config.texture_dir, font_names, config),
        ) as pool:
            results = list(pool.map(_worker_render, tasks, chunksize=16))
    return write_dataset(results, out_dir)


def preview_grid(
    config: GeneratorConfig,
    entries: list[AlphabetEntry],
    fonts_dir: str,
    rows: int,
    cols: int,
    master_seed: int = 0,
) -> np.ndarray:
    """A rows x cols contact sheet: one class per row, instances across."""
    assets = load_assets(fonts_dir, config.texture_dir)
    entries = sorted(entries, key=lambda e: e.codepoints)
    size = config.size
    sheet = np.full((rows * size, cols * size, 3), 255, dtype=np.uint8)
    for r in range(rows):
        entry = entries[r % len(entries)]
        for c in range(cols):
            _, png = None, None
            record, png = _render_one(assets, config, entry, r, c, master_seed)
            img = read_png(png)
            if img.ndim == 2:
                img = np.repeat(img[..., None], 3, axis=2)
            sheet[r * size : (r + 1) * size, c * size : (c + 1) * size] = img
    return sheet
