"""Font binary parsing, the matching minimal writer, and fixture fonts."""

from charsynth.fontio.parser import (
    AnchorPoint,
    FontFace,
    GlyphOutline,
    coverage,
    glyph_for,
    parse_font,
)

__all__ = [
    "AnchorPoint",
    "FontFace",
    "GlyphOutline",
    "coverage",
    "glyph_for",
    "parse_font",
]
