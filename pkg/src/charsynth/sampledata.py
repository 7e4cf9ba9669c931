"""Self-contained demo assets: fixture fonts, smooth-noise textures, and a
small alphabet file, so generation runs without any user-supplied corpus."""

from __future__ import annotations

import os

import numpy as np

from charsynth.fontio.fixtures import FIXTURE_CHARS, write_fixture_fonts
from charsynth.pngio import write_png
from charsynth.raster import gaussian_blur, lanczos_resize

TEXTURE_SIZE = 160

_PALETTES = {
    "paper": ((205, 185, 150), (245, 235, 210)),
    "moss": ((40, 80, 45), (140, 180, 120)),
    "dusk": ((60, 50, 110), (200, 140, 160)),
}


def _texture(name: str, lo: tuple, hi: tuple, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    base = rng.uniform(0.0, 1.0, (20, 20))
    field = lanczos_resize(base, TEXTURE_SIZE, TEXTURE_SIZE)
    field = gaussian_blur(field, 1.5)
    field = (field - field.min()) / max(field.max() - field.min(), 1e-9)
    lo_arr = np.array(lo, dtype=np.float64)
    hi_arr = np.array(hi, dtype=np.float64)
    img = lo_arr + field[..., None] * (hi_arr - lo_arr)
    return np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)


def write_demo_textures(out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for i, (name, (lo, hi)) in enumerate(sorted(_PALETTES.items())):
        fname = f"texture-{name}.png"
        with open(os.path.join(out_dir, fname), "wb") as fh:
            fh.write(write_png(_texture(name, lo, hi, seed=1000 + i)))
        written.append(fname)
    return written


def write_demo_alphabet(path: str, chars: str = FIXTURE_CHARS) -> None:
    """Alphabet file over the fixture font's repertoire (digits + capitals)."""
    lines = ["# demo alphabet: ASCII digits and basic Latin capitals"]
    digits = [c for c in chars if c.isdigit()]
    letters = [c for c in chars if not c.isdigit()]
    if digits:
        lines.append("super_class=ascii_digits")
        lines.extend(digits)
    if letters:
        lines.append("super_class=latin_upper")
        lines.extend(letters)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_demo_assets(root: str) -> dict:
    """Fonts under root/fonts, textures under root/textures, alphabet file."""
    fonts_dir = os.path.join(root, "fonts")
    textures_dir = os.path.join(root, "textures")
    alphabet = os.path.join(root, "alphabet.txt")
    os.makedirs(root, exist_ok=True)
    fonts = write_fixture_fonts(fonts_dir)
    textures = write_demo_textures(textures_dir)
    write_demo_alphabet(alphabet)
    return {
        "fonts_dir": fonts_dir,
        "textures_dir": textures_dir,
        "alphabet": alphabet,
        "fonts": fonts,
        "textures": textures,
    }
