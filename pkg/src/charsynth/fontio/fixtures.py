"""Procedural fixture fonts.

Builds a small registry of self-contained TrueType files from a 5x7
dot-matrix design for digits and basic Latin capitals, in several styles
(weight, slant, rounding, width). Real font corpora are user-supplied; these
fixtures make the package and its test suite runnable out of the box.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from charsynth.fontio.writer import GlyphDef, write_font

_GRID = {
    "0": (".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."),
    "1": ("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "2": (".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"),
    "3": ("#####", "....#", "...#.", "..##.", "....#", "#...#", ".###."),
    "4": ("...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."),
    "5": ("#####", "#....", "####.", "....#", "....#", "#...#", ".###."),
    "6": ("..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."),
    "7": ("#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."),
    "8": (".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),
    "9": (".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."),
    "A": (".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "B": ("####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."),
    "C": (".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."),
    "D": ("####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."),
    "E": ("#####", "#....", "#....", "####.", "#....", "#....", "#####"),
    "F": ("#####", "#....", "#....", "####.", "#....", "#....", "#...."),
    "G": (".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".###."),
    "H": ("#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "I": (".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "J": ("..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."),
    "K": ("#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"),
    "L": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "M": ("#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"),
    "N": ("#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"),
    "O": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "P": ("####.", "#...#", "#...#", "####.", "#....", "#....", "#...."),
    "Q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "R": ("####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"),
    "S": (".####", "#....", "#....", ".###.", "....#", "....#", "####."),
    "T": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "U": ("#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "V": ("#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."),
    "W": ("#...#", "#...#", "#...#", "#.#.#", "#.#.#", "##.##", "#...#"),
    "X": ("#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"),
    "Y": ("#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."),
    "Z": ("#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"),
}

FIXTURE_CHARS = "".join(sorted(_GRID))  # 0-9 then A-Z
UNITS_PER_EM = 1000


@dataclass(frozen=True)
class FixtureStyle:
    style_name: str
    cell_x: int = 110
    cell_y: int = 110
    inset: int = 8  # shrink (+) or grow (-) of each bar, in font units
    slant: float = 0.0
    chamfer: int = 0  # corner rounding radius; produces off-curve points


STYLES = (
    FixtureStyle("Regular"),
    FixtureStyle("Bold", inset=-16),
    FixtureStyle("Light", inset=24),
    FixtureStyle("Italic", slant=0.25),
    FixtureStyle("Rounded", inset=6, chamfer=32),
    FixtureStyle("Condensed", cell_x=82),
)


def _runs(row: str):
    start = None
    for i, ch in enumerate(row + "."):
        if ch == "#" and start is None:
            start = i
        elif ch != "#" and start is not None:
            yield (start, i)
            start = None


def _rect_contour(x0: float, y0: float, x1: float, y1: float, chamfer: int, slant: float):
    if chamfer > 0:
        c = min(chamfer, (x1 - x0) / 2.0, (y1 - y0) / 2.0)
        pts = [
            (x0 + c, y0, True),
            (x1 - c, y0, True),
            (x1, y0, False),
            (x1, y0 + c, True),
            (x1, y1 - c, True),
            (x1, y1, False),
            (x1 - c, y1, True),
            (x0 + c, y1, True),
            (x0, y1, False),
            (x0, y1 - c, True),
            (x0, y0 + c, True),
            (x0, y0, False),
        ]
    else:
        pts = [(x0, y0, True), (x1, y0, True), (x1, y1, True), (x0, y1, True)]
    return [(x + slant * y, y, on) for x, y, on in pts]


def _glyph_for_char(ch: str, style: FixtureStyle) -> GlyphDef:
    rows = _GRID[ch]
    n_rows = len(rows)
    bearing = 60
    contours = []
    for r, row in enumerate(rows):
        y1 = (n_rows - r) * style.cell_y  # row 0 is the top of the glyph
        y0 = y1 - style.cell_y
        for c0, c1 in _runs(row):
            x0 = bearing + c0 * style.cell_x + style.inset
            x1 = bearing + c1 * style.cell_x - style.inset
            contours.append(
                _rect_contour(x0, y0 + style.inset, x1, y1 - style.inset, style.chamfer, style.slant)
            )
    advance = bearing * 2 + 5 * style.cell_x + round(style.slant * n_rows * style.cell_y / 2)
    return GlyphDef(contours=contours, advance=advance)


def _notdef_glyph(style: FixtureStyle) -> GlyphDef:
    # Hollow box: outer contour plus reversed inner contour (nonzero-rule hole).
    outer = [(100, 0, True), (500, 0, True), (500, 700, True), (100, 700, True)]
    inner = [(160, 60, True), (160, 640, True), (440, 640, True), (440, 60, True)]
    return GlyphDef(contours=[outer, inner], advance=600)


def build_fixture_font(style: FixtureStyle) -> bytes:
    """One complete fixture font covering 0-9, A-Z, and space."""
    glyphs = [_notdef_glyph(style)]
    codepoint_map: dict[int, int] = {}
    for ch in FIXTURE_CHARS:
        glyphs.append(_glyph_for_char(ch, style))
        codepoint_map[ord(ch)] = len(glyphs) - 1
    glyphs.append(GlyphDef(contours=[], advance=5 * style.cell_x // 2))  # space
    codepoint_map[0x20] = len(glyphs) - 1
    return write_font(
        glyphs,
        codepoint_map,
        units_per_em=UNITS_PER_EM,
        family_name="Charsynth Fixture",
        style_name=style.style_name,
        ascender=800,
        descender=-200,
    )


def write_fixture_fonts(out_dir: str) -> list[str]:
    """Materialize the whole fixture registry; returns the written file names."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for style in STYLES:
        name = f"fixture-{style.style_name.lower()}.ttf"
        with open(os.path.join(out_dir, name), "wb") as fh:
            fh.write(build_fixture_font(style))
        written.append(name)
    return written
