"""Minimal TrueType writer.

Independent of the parser: emits the same container format (head, hhea, maxp,
hmtx, cmap format 4, loca, glyf, name) from plain glyph descriptions. Used to
build fixture fonts and as the round-trip oracle for the parser.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field


@dataclass
class Component:
    glyph_index: int
    dx: int = 0
    dy: int = 0
    # FreeType convention: x' = xx*x + xy*y, y' = yx*x + yy*y
    xx: float = 1.0
    xy: float = 0.0
    yx: float = 0.0
    yy: float = 1.0


@dataclass
class GlyphDef:
    """One glyph: either simple contours of (x, y, on_curve) or components."""

    contours: list[list[tuple[float, float, bool]]] = field(default_factory=list)
    advance: int = 0
    components: list[Component] = field(default_factory=list)

    def int_contours(self):
        return [[(round(x), round(y), bool(on)) for x, y, on in c] for c in self.contours]


def _glyph_bbox(glyph: GlyphDef, glyphs: list[GlyphDef]) -> tuple[int, int, int, int]:
    xs, ys = [], []
    for contour in glyph.int_contours():
        xs.extend(p[0] for p in contour)
        ys.extend(p[1] for p in contour)
    for comp in glyph.components:
        bx0, by0, bx1, by1 = _glyph_bbox(glyphs[comp.glyph_index], glyphs)
        for cx, cy in ((bx0, by0), (bx0, by1), (bx1, by0), (bx1, by1)):
            xs.append(round(comp.xx * cx + comp.xy * cy + comp.dx))
            ys.append(round(comp.yx * cx + comp.yy * cy + comp.dy))
    if not xs:
        return (0, 0, 0, 0)
    return (min(xs), min(ys), max(xs), max(ys))


def _encode_simple(glyph: GlyphDef, glyphs: list[GlyphDef]) -> bytes:
    contours = glyph.int_contours()
    xmin, ymin, xmax, ymax = _glyph_bbox(glyph, glyphs)
    out = bytearray(struct.pack(">hhhhh", len(contours), xmin, ymin, xmax, ymax))
    end_pts = []
    total = 0
    for contour in contours:
        total += len(contour)
        end_pts.append(total - 1)
    out += struct.pack(f">{len(end_pts)}H", *end_pts)
    out += struct.pack(">H", 0)  # no instructions
    points = [p for c in contours for p in c]
    # Plain encoding: one flag byte per point, long (16-bit) deltas throughout.
    for _, _, on in points:
        out.append(0x01 if on else 0x00)
    prev = 0
    for x, _, _ in points:
        out += struct.pack(">h", x - prev)
        prev = x
    prev = 0
    for _, y, _ in points:
        out += struct.pack(">h", y - prev)
        prev = y
    return bytes(out)


def _f2dot14(v: float) -> int:
    raw = round(v * 16384.0)
    if not -32768 <= raw <= 32767:
        raise ValueError(f"component scale {v} out of F2Dot14 range")
    return raw & 0xFFFF


def _encode_composite(glyph: GlyphDef, glyphs: list[GlyphDef]) -> bytes:
    xmin, ymin, xmax, ymax = _glyph_bbox(glyph, glyphs)
    out = bytearray(struct.pack(">hhhhh", -1, xmin, ymin, xmax, ymax))
    for i, comp in enumerate(glyph.components):
        identity = (comp.xx, comp.xy, comp.yx, comp.yy) == (1.0, 0.0, 0.0, 1.0)
        flags = 0x0001 | 0x0002  # words + xy values
        if not identity:
            if comp.xy == 0.0 and comp.yx == 0.0 and comp.xx == comp.yy:
                flags |= 0x0008
            elif comp.xy == 0.0 and comp.yx == 0.0:
                flags |= 0x0040
            else:
                flags |= 0x0080
        if i + 1 < len(glyph.components):
            flags |= 0x0020
        out += struct.pack(">HHhh", flags, comp.glyph_index, comp.dx, comp.dy)
        if flags & 0x0008:
            out += struct.pack(">H", _f2dot14(comp.xx))
        elif flags & 0x0040:
            out += struct.pack(">HH", _f2dot14(comp.xx), _f2dot14(comp.yy))
        elif flags & 0x0080:
            out += struct.pack(
                ">HHHH",
                _f2dot14(comp.xx),
                _f2dot14(comp.yx),
                _f2dot14(comp.xy),
                _f2dot14(comp.yy),
            )
    return bytes(out)


def _build_cmap(codepoint_map: dict[int, int]) -> bytes:
    # Merge consecutive code points with consecutive glyph ids into segments.
    segments: list[tuple[int, int, int]] = []  # (start, end, gid_of_start)
    for cp in sorted(codepoint_map):
        gid = codepoint_map[cp]
        if segments and cp == segments[-1][1] + 1 and gid == codepoint_map[segments[-1][0]] + (
            cp - segments[-1][0]
        ):
            segments[-1] = (segments[-1][0], cp, segments[-1][2])
        else:
            segments.append((cp, cp, gid))
    seg_count = len(segments) + 1  # terminator segment
    end_codes = [end for _, end, _ in segments] + [0xFFFF]
    start_codes = [start for start, _, _ in segments] + [0xFFFF]
    id_deltas = [(gid - start) & 0xFFFF for start, _, gid in segments] + [1]
    id_range_offsets = [0] * seg_count

    search_range = 2 ** (seg_count.bit_length() - 1) * 2
    entry_selector = seg_count.bit_length() - 1
    sub = struct.pack(
        ">HHHHHHH",
        4,
        16 + 8 * seg_count,
        0,
        seg_count * 2,
        search_range,
        entry_selector,
        seg_count * 2 - search_range,
    )
    sub += struct.pack(f">{seg_count}H", *end_codes)
    sub += struct.pack(">H", 0)
    sub += struct.pack(f">{seg_count}H", *start_codes)
    sub += struct.pack(f">{seg_count}H", *id_deltas)
    sub += struct.pack(f">{seg_count}H", *id_range_offsets)
    return struct.pack(">HHHHI", 0, 1, 3, 1, 12) + sub


def _build_name(family: str, style: str) -> bytes:
    strings = [(1, family.encode("utf-16-be")), (2, style.encode("utf-16-be"))]
    header = struct.pack(">HHH", 0, len(strings), 6 + 12 * len(strings))
    records = b""
    blob = b""
    for name_id, raw in strings:
        records += struct.pack(">HHHHHH", 3, 1, 0x409, name_id, len(raw), len(blob))
        blob += raw
    return header + records + blob


def _checksum(data: bytes) -> int:
    if len(data) % 4:
        data = data + b"\0" * (4 - len(data) % 4)
    total = 0
    for (v,) in struct.iter_unpack(">I", data):
        total = (total + v) & 0xFFFFFFFF
    return total


def write_font(
    glyphs: list[GlyphDef],
    codepoint_map: dict[int, int],
    units_per_em: int = 1000,
    family_name: str = "Fixture",
    style_name: str = "Regular",
    ascender: int = 800,
    descender: int = -200,
) -> bytes:
    """Assemble a complete TrueType binary. Glyph 0 is the missing glyph."""
    if not glyphs:
        raise ValueError("at least the missing glyph (index 0) is required")
    glyf = bytearray()
    loca = [0]
    for glyph in glyphs:
        if glyph.components:
            encoded = _encode_composite(glyph, glyphs)
        elif glyph.contours:
            encoded = _encode_simple(glyph, glyphs)
        else:
            encoded = b""
        glyf += encoded
        if len(glyf) % 4:
            glyf += b"\0" * (4 - len(glyf) % 4)
        loca.append(len(glyf))

    boxes = [_glyph_bbox(g, glyphs) for g in glyphs]
    xmin = min((b[0] for b in boxes), default=0)
    ymin = min((b[1] for b in boxes), default=0)
    xmax = max((b[2] for b in boxes), default=0)
    ymax = max((b[3] for b in boxes), default=0)

    head = struct.pack(
        ">IIIIHHqqhhhhHHhhh",
        0x00010000,
        0x00010000,
        0,  # checkSumAdjustment, patched below
        0x5F0F3CF5,
        0,
        units_per_em,
        0,
        0,
        xmin,
        ymin,
        xmax,
        ymax,
        0,
        8,
        2,
        1,  # long loca format
        0,
    )

    max_advance = max((g.advance for g in glyphs), default=0)
    hhea = struct.pack(
        ">IhhhHhhhhhhhhhhhH",
        0x00010000,
        ascender,
        descender,
        0,
        max_advance,
        xmin,
        0,
        xmax,
        1,
        0,
        0,
        0,
        0,
        0,
        0,
        0,
        len(glyphs),
    )

    max_points = max((sum(len(c) for c in g.int_contours()) for g in glyphs), default=0)
    max_contours = max((len(g.contours) for g in glyphs), default=0)
    maxp = struct.pack(
        ">IHHHHHHHHHHHHHH",
        0x00010000,
        len(glyphs),
        max_points,
        max_contours,
        max_points,
        max_contours,
        2,
        0,
        0,
        0,
        0,
        0,
        0,
        max(len(g.components) for g in glyphs) if glyphs else 0,
        2,
    )

    hmtx = b"".join(
        struct.pack(">Hh", g.advance, _glyph_bbox(g, glyphs)[0]) for g in glyphs
    )
    loca_bytes = struct.pack(f">{len(loca)}I", *loca)
    cmap = _build_cmap(codepoint_map)
    name = _build_name(family_name, style_name)

    table_data = {
        b"cmap": cmap,
        b"glyf": bytes(glyf),
        b"head": head,
        b"hhea": hhea,
        b"hmtx": hmtx,
        b"loca": loca_bytes,
        b"maxp": maxp,
        b"name": name,
    }
    tags = sorted(table_data)
    num_tables = len(tags)
    entry_selector = num_tables.bit_length() - 1
    search_range = 16 * (2**entry_selector)
    font = bytearray(
        struct.pack(">IHHHH", 0x00010000, num_tables, search_range, entry_selector, 16 * num_tables - search_range)
    )
    offset = 12 + 16 * num_tables
    directory = bytearray()
    body = bytearray()
    head_offset = None
    for tag in tags:
        payload = table_data[tag]
        if tag == b"head":
            head_offset = offset
        directory += struct.pack(">4sIII", tag, _checksum(payload), offset, len(payload))
        body += payload
        pad = (4 - len(payload) % 4) % 4
        body += b"\0" * pad
        offset += len(payload) + pad
    font += directory + body

    assert head_offset is not None
    adjustment = (0xB1B0AFBA - _checksum(bytes(font))) & 0xFFFFFFFF
    struct.pack_into(">I", font, head_offset + 8, adjustment)
    return bytes(font)


def write_cff_stub() -> bytes:
    """A syntactically valid container whose only outline table is CFF."""
    payloads = {b"CFF ": b"\x01\x00\x04\x04" + b"\0" * 16}
    tags = sorted(payloads)
    font = bytearray(struct.pack(">IHHHH", 0x00010000, len(tags), 16, 0, 0))
    offset = 12 + 16 * len(tags)
    body = bytearray()
    for tag in tags:
        payload = payloads[tag]
        font += struct.pack(">4sIII", tag, _checksum(payload), offset, len(payload))
        body += payload
        offset += len(payload)
    return bytes(font + body)
