"""TrueType outline parsing.

Reads the quadratic-outline tables of a TrueType container (header,
index-to-location, glyph data, character map, horizontal metrics, naming)
into anchor-point outlines. CFF/cubic outlines and exotic character-map
subtables are rejected with typed errors. No hinting: coordinates stay in
font units as real numbers and are never snapped to a grid.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

from charsynth.errors import (
    MalformedFont,
    MissingGlyph,
    RecursionLimit,
    UnsupportedOutlineFormat,
)

_MAGIC = 0x5F0F3CF5
_MAX_COMPOSITE_DEPTH = 8

# glyf simple-glyph flag bits
_ON_CURVE = 0x01
_X_SHORT = 0x02
_Y_SHORT = 0x04
_REPEAT = 0x08
_X_SAME_OR_POS = 0x10
_Y_SAME_OR_POS = 0x20

# glyf composite flag bits
_ARGS_ARE_WORDS = 0x0001
_ARGS_ARE_XY = 0x0002
_HAVE_SCALE = 0x0008
_MORE_COMPONENTS = 0x0020
_HAVE_XY_SCALE = 0x0040
_HAVE_2X2 = 0x0080


@dataclass(frozen=True)
class AnchorPoint:
    """A control point of a quadratic outline (on-curve or off-curve)."""

    x: float
    y: float
    on_curve: bool


@dataclass(frozen=True)
class GlyphOutline:
    """Closed contours of anchor points plus the horizontal advance."""

    contours: tuple[tuple[AnchorPoint, ...], ...]
    advance_width: float

    def is_empty(self) -> bool:
        return len(self.contours) == 0

    def points(self):
        for contour in self.contours:
            yield from contour

    def bbox(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax) over all anchor points; (0,0,0,0) if empty."""
        xs = [p.x for p in self.points()]
        ys = [p.y for p in self.points()]
        if not xs:
            return (0.0, 0.0, 0.0, 0.0)
        return (min(xs), min(ys), max(xs), max(ys))


class FontFace:
    """An immutable parsed font: metadata, character map, lazy glyph access."""

    def __init__(
        self,
        units_per_em: int,
        family_name: str,
        style_name: str,
        ascender: int,
        descender: int,
        codepoint_map: dict[int, int],
        glyph_count: int,
        glyf_data: bytes,
        loca: list[int],
        metrics: list[tuple[int, int]],
    ):
        self.units_per_em = units_per_em
        self.family_name = family_name
        self.style_name = style_name
        self.ascender = ascender
        self.descender = descender
        self.codepoint_map = codepoint_map
        self.glyph_count = glyph_count
        self._glyf = glyf_data
        self._loca = loca
        self._metrics = metrics

    def outline_for_gid(self, gid: int, _depth: int = 0) -> GlyphOutline:
        """Parse the outline of one glyph index, resolving composites."""
        if not 0 <= gid < self.glyph_count:
            raise MissingGlyph(f"glyph index {gid} out of range")
        if _depth > _MAX_COMPOSITE_DEPTH:
            raise RecursionLimit(f"composite nesting deeper than {_MAX_COMPOSITE_DEPTH}")
        advance = float(self._metrics[gid][0])
        start, end = self._loca[gid], self._loca[gid + 1]
        if start == end:
            return GlyphOutline(contours=(), advance_width=advance)
        data = self._glyf[start:end]
        try:
            (n_contours,) = struct.unpack_from(">h", data, 0)
            if n_contours >= 0:
                contours = _parse_simple(data, n_contours)
            else:
                contours = self._parse_composite(data, _depth)
        except struct.error as exc:
            raise MalformedFont(f"glyph {gid}: truncated outline data") from exc
        normalized = tuple(c for c in (_normalize_contour(c) for c in contours) if len(c) >= 2)
        for contour in normalized:
            for p in contour:
                if not (math.isfinite(p.x) and math.isfinite(p.y)):
                    raise MalformedFont(f"glyph {gid}: non-finite coordinate")
        return GlyphOutline(contours=normalized, advance_width=advance)

    def _parse_composite(self, data: bytes, depth: int):
        contours = []
        pos = 10  # past numberOfContours and bbox
        while True:
            flags, component_gid = struct.unpack_from(">HH", data, pos)
            pos += 4
            if not flags & _ARGS_ARE_XY:
                raise UnsupportedOutlineFormat("point-matching composite glyphs not supported")
            if flags & _ARGS_ARE_WORDS:
                dx, dy = struct.unpack_from(">hh", data, pos)
                pos += 4
            else:
                dx, dy = struct.unpack_from(">bb", data, pos)
                pos += 2
            # FreeType convention: x' = xx*x + xy*y, y' = yx*x + yy*y
            xx = yy = 1.0
            xy = yx = 0.0
            if flags & _HAVE_SCALE:
                (s,) = struct.unpack_from(">h", data, pos)
                pos += 2
                xx = yy = s / 16384.0
            elif flags & _HAVE_XY_SCALE:
                sx, sy = struct.unpack_from(">hh", data, pos)
                pos += 4
                xx, yy = sx / 16384.0, sy / 16384.0
            elif flags & _HAVE_2X2:
                v = struct.unpack_from(">hhhh", data, pos)
                pos += 8
                xx, yx, xy, yy = (c / 16384.0 for c in v)
            component = self.outline_for_gid(component_gid, depth + 1)
            for contour in component.contours:
                contours.append(
                    [
                        (xx * p.x + xy * p.y + dx, yx * p.x + yy * p.y + dy, p.on_curve)
                        for p in contour
                    ]
                )
            if not flags & _MORE_COMPONENTS:
                break
        return contours


def _parse_simple(data: bytes, n_contours: int):
    pos = 10
    end_pts = struct.unpack_from(f">{n_contours}H", data, pos)
    pos += 2 * n_contours
    n_points = end_pts[-1] + 1 if n_contours else 0
    (instr_len,) = struct.unpack_from(">H", data, pos)
    pos += 2 + instr_len

    flags = []
    while len(flags) < n_points:
        flag = data[pos]
        pos += 1
        flags.append(flag)
        if flag & _REPEAT:
            repeat = data[pos]
            pos += 1
            flags.extend([flag] * repeat)
    if len(flags) != n_points:
        raise MalformedFont("glyph flag count mismatch")

    xs = []
    x = 0
    for flag in flags:
        if flag & _X_SHORT:
            delta = data[pos]
            pos += 1
            x += delta if flag & _X_SAME_OR_POS else -delta
        elif not flag & _X_SAME_OR_POS:
            (delta,) = struct.unpack_from(">h", data, pos)
            pos += 2
            x += delta
        xs.append(x)
    ys = []
    y = 0
    for flag in flags:
        if flag & _Y_SHORT:
            delta = data[pos]
            pos += 1
            y += delta if flag & _Y_SAME_OR_POS else -delta
        elif not flag & _Y_SAME_OR_POS:
            (delta,) = struct.unpack_from(">h", data, pos)
            pos += 2
            y += delta
        ys.append(y)

    contours = []
    start = 0
    for end in end_pts:
        contours.append(
            [
                (float(xs[i]), float(ys[i]), bool(flags[i] & _ON_CURVE))
                for i in range(start, end + 1)
            ]
        )
        start = end + 1
    return contours


def _normalize_contour(points) -> tuple[AnchorPoint, ...]:
    """Insert implied on-curve midpoints so no two off-curve points stay adjacent.

    The contour is rotated to start on-curve first (TrueType rule: if the first
    point is off-curve, start from the last point when on-curve, otherwise from
    the implied midpoint of first and last).
    """
    pts = [(float(x), float(y), bool(on)) for x, y, on in points]
    if not pts:
        return ()
    if not any(on for _, _, on in pts):
        # All off-curve: every midpoint is implied.
        out = []
        n = len(pts)
        for i in range(n):
            x0, y0, _ = pts[i]
            x1, y1, _ = pts[(i + 1) % n]
            out.append(AnchorPoint(x0, y0, False))
            out.append(AnchorPoint((x0 + x1) / 2.0, (y0 + y1) / 2.0, True))
        return tuple(out)
    if not pts[0][2]:
        if pts[-1][2]:
            pts = pts[-1:] + pts[:-1]
        else:
            mid = (
                (pts[0][0] + pts[-1][0]) / 2.0,
                (pts[0][1] + pts[-1][1]) / 2.0,
                True,
            )
            pts = [mid] + pts
    out = []
    n = len(pts)
    for i in range(n):
        x0, y0, on0 = pts[i]
        x1, y1, on1 = pts[(i + 1) % n]
        out.append(AnchorPoint(x0, y0, on0))
        if not on0 and not on1:
            out.append(AnchorPoint((x0 + x1) / 2.0, (y0 + y1) / 2.0, True))
    return tuple(out)


def _table_checksum_ok(face_bytes: bytes) -> bool:
    return True  # reserved for stricter validation; offsets/magic are checked instead


def parse_font(data: bytes) -> FontFace:
    """Parse a TrueType binary into a FontFace.

    Raises MalformedFont on truncation or invalid structure and
    UnsupportedOutlineFormat for CFF outlines or unsupported cmap subtables.
    """
    if not data:
        raise MalformedFont("empty font data")
    if len(data) < 12:
        raise MalformedFont("shorter than an offset table")
    (sfnt_version,) = struct.unpack_from(">I", data, 0)
    if sfnt_version not in (0x00010000, 0x74727565):  # 1.0 or 'true'
        if sfnt_version == 0x4F54544F:  # 'OTTO': CFF container
            raise UnsupportedOutlineFormat("CFF-based font (no quadratic outlines)")
        raise MalformedFont(f"unknown sfnt version 0x{sfnt_version:08x}")
    (num_tables,) = struct.unpack_from(">H", data, 4)
    tables: dict[bytes, tuple[int, int]] = {}
    pos = 12
    for _ in range(num_tables):
        if pos + 16 > len(data):
            raise MalformedFont("truncated table directory")
        tag, _checksum, offset, length = struct.unpack_from(">4sIII", data, pos)
        pos += 16
        if offset + length > len(data):
            raise MalformedFont(f"table {tag!r} extends past end of file")
        tables[tag] = (offset, length)

    if b"CFF " in tables and b"glyf" not in tables:
        raise UnsupportedOutlineFormat("CFF outline table without quadratic glyph data")
    for required in (b"head", b"maxp", b"hhea", b"hmtx", b"loca", b"glyf", b"cmap"):
        if required not in tables:
            raise MalformedFont(f"missing required table {required.decode()}")

    def table(tag: bytes) -> bytes:
        offset, length = tables[tag]
        return data[offset : offset + length]

    head = table(b"head")
    if len(head) < 54:
        raise MalformedFont("head table truncated")
    (magic,) = struct.unpack_from(">I", head, 12)
    if magic != _MAGIC:
        raise MalformedFont("bad head magic number")
    (units_per_em,) = struct.unpack_from(">H", head, 18)
    if units_per_em == 0:
        raise MalformedFont("units_per_em is zero")
    (index_to_loc_format,) = struct.unpack_from(">h", head, 50)

    maxp = table(b"maxp")
    (glyph_count,) = struct.unpack_from(">H", maxp, 4)

    hhea = table(b"hhea")
    ascender, descender = struct.unpack_from(">hh", hhea, 4)
    (num_h_metrics,) = struct.unpack_from(">H", hhea, 34)
    if ascender < 0 or descender > 0:
        raise MalformedFont("ascender/descender metrics out of order")

    hmtx = table(b"hmtx")
    metrics: list[tuple[int, int]] = []
    try:
        advance = 0
        for i in range(num_h_metrics):
            advance, lsb = struct.unpack_from(">Hh", hmtx, 4 * i)
            metrics.append((advance, lsb))
        for i in range(glyph_count - num_h_metrics):
            (lsb,) = struct.unpack_from(">h", hmtx, 4 * num_h_metrics + 2 * i)
            metrics.append((advance, lsb))
    except struct.error as exc:
        raise MalformedFont("hmtx table truncated") from exc

    loca_raw = table(b"loca")
    try:
        if index_to_loc_format == 0:
            loca = [2 * v for v in struct.unpack(f">{glyph_count + 1}H", loca_raw[: 2 * (glyph_count + 1)])]
        elif index_to_loc_format == 1:
            loca = list(struct.unpack(f">{glyph_count + 1}I", loca_raw[: 4 * (glyph_count + 1)]))
        else:
            raise MalformedFont(f"bad indexToLocFormat {index_to_loc_format}")
    except struct.error as exc:
        raise MalformedFont("loca table truncated") from exc
    glyf = table(b"glyf")
    if any(off > len(glyf) for off in loca):
        raise MalformedFont("loca offsets exceed glyf table")
    if any(loca[i] > loca[i + 1] for i in range(glyph_count)):
        raise MalformedFont("loca offsets not monotone")

    codepoint_map = _parse_cmap(table(b"cmap"))
    for gid in codepoint_map.values():
        if gid >= glyph_count:
            raise MalformedFont("cmap maps to glyph index beyond glyph count")

    family, style = _parse_name(table(b"name")) if b"name" in tables else ("", "")

    return FontFace(
        units_per_em=units_per_em,
        family_name=family,
        style_name=style,
        ascender=ascender,
        descender=descender,
        codepoint_map=codepoint_map,
        glyph_count=glyph_count,
        glyf_data=glyf,
        loca=loca,
        metrics=metrics,
    )


def _parse_cmap(cmap: bytes) -> dict[int, int]:
    (num_subtables,) = struct.unpack_from(">H", cmap, 2)
    candidates = []
    for i in range(num_subtables):
        platform, encoding, offset = struct.unpack_from(">HHI", cmap, 4 + 8 * i)
        if offset + 2 > len(cmap):
            raise MalformedFont("cmap subtable offset out of range")
        (fmt,) = struct.unpack_from(">H", cmap, offset)
        # Prefer Windows/Unicode BMP, then generic Unicode.
        preference = {(3, 1): 0, (0, 3): 1, (0, 4): 1}.get((platform, encoding), 2)
        candidates.append((preference, fmt, offset))
    supported = [c for c in candidates if c[1] in (4, 6)]
    if not supported:
        raise UnsupportedOutlineFormat(
            f"no segmented/sequential cmap subtable (found formats {sorted({c[1] for c in candidates})})"
        )
    supported.sort()
    _, fmt, offset = supported[0]
    if fmt == 4:
        return _parse_cmap_format4(cmap, offset)
    return _parse_cmap_format6(cmap, offset)


def _parse_cmap_format4(cmap: bytes, offset: int) -> dict[int, int]:
    (seg_count_x2,) = struct.unpack_from(">H", cmap, offset + 6)
    seg_count = seg_count_x2 // 2
    pos = offset + 14
    end_codes = struct.unpack_from(f">{seg_count}H", cmap, pos)
    pos += seg_count_x2 + 2  # skip reservedPad
    start_codes = struct.unpack_from(f">{seg_count}H", cmap, pos)
    pos += seg_count_x2
    id_deltas = struct.unpack_from(f">{seg_count}h", cmap, pos)
    pos += seg_count_x2
    range_offset_base = pos
    id_range_offsets = struct.unpack_from(f">{seg_count}H", cmap, pos)

    mapping: dict[int, int] = {}
    for i in range(seg_count):
        start, end = start_codes[i], end_codes[i]
        if start == 0xFFFF:
            continue
        for cp in range(start, min(end, 0xFFFE) + 1):
            if id_range_offsets[i] == 0:
                gid = (cp + id_deltas[i]) & 0xFFFF
            else:
                addr = range_offset_base + 2 * i + id_range_offsets[i] + 2 * (cp - start)
                if addr + 2 > len(cmap):
                    raise MalformedFont("cmap glyph id array out of range")
                (gid,) = struct.unpack_from(">H", cmap, addr)
                if gid != 0:
                    gid = (gid + id_deltas[i]) & 0xFFFF
            if gid != 0:
                mapping[cp] = gid
    return mapping


def _parse_cmap_format6(cmap: bytes, offset: int) -> dict[int, int]:
    first, count = struct.unpack_from(">HH", cmap, offset + 6)
    gids = struct.unpack_from(f">{count}H", cmap, offset + 10)
    return {first + i: gid for i, gid in enumerate(gids) if gid != 0}


def _parse_name(name_table: bytes) -> tuple[str, str]:
    try:
        _, count, string_offset = struct.unpack_from(">HHH", name_table, 0)
    except struct.error:
        return ("", "")
    found: dict[int, str] = {}
    for i in range(count):
        try:
            platform, encoding, _lang, name_id, length, offset = struct.unpack_from(
                ">HHHHHH", name_table, 6 + 12 * i
            )
        except struct.error:
            break
        if name_id not in (1, 2):
            continue
        raw = name_table[string_offset + offset : string_offset + offset + length]
        if platform == 3 and encoding == 1:
            found[name_id] = raw.decode("utf-16-be", errors="replace")
        elif name_id not in found:
            found[name_id] = raw.decode("latin-1", errors="replace")
    return (found.get(1, ""), found.get(2, ""))


def glyph_for(face: FontFace, cp: int) -> GlyphOutline:
    """Load the normalized outline for a code point.

    Raises MissingGlyph when the code point is unmapped.
    """
    gid = face.codepoint_map.get(cp)
    if gid is None:
        raise MissingGlyph(f"U+{cp:04X} not mapped by this font")
    return face.outline_for_gid(gid)


def coverage(face: FontFace, cps) -> bool:
    """True iff every code point renders: mapped, non-missing, and either
    inked or legitimately empty (whitespace)."""
    cps = list(cps)
    if not cps:
        raise ValueError("coverage requires a non-empty code point set")
    for cp in cps:
        gid = face.codepoint_map.get(cp)
        if gid is None or gid == 0:
            return False
        outline = face.outline_for_gid(gid)
        if outline.is_empty() and not chr(cp).isspace():
            return False
    return True
