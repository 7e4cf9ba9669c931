"""Minimal deterministic PNG writer/reader.

The writer always emits 8-bit non-interlaced PNGs (RGB or grayscale) with
filter type 0 on every scanline and a fixed zlib level, so re-running a
generation produces byte-identical files. The reader handles exactly the
subset the writer emits plus the standard per-row filters, enough to read
back any dataset this package writes.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_ZLIB_LEVEL = 6


def _chunk(tag: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + tag
        + payload
        + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF)
    )


def write_png(img: np.ndarray) -> bytes:
    """Encode a (H, W) grayscale or (H, W, 3) RGB uint8 array."""
    if img.dtype != np.uint8:
        raise ValueError("write_png expects uint8 samples")
    if img.ndim == 2:
        color_type = 0
        rows = img
    elif img.ndim == 3 and img.shape[2] == 3:
        color_type = 2
        rows = img
    else:
        raise ValueError(f"unsupported image shape {img.shape}")
    h, w = img.shape[:2]
    ihdr = struct.pack(">IIBBBBB", w, h, 8, color_type, 0, 0, 0)
    raw = bytearray()
    for r in range(h):
        raw.append(0)  # filter type 0 on every row
        raw.extend(rows[r].tobytes())
    idat = zlib.compress(bytes(raw), _ZLIB_LEVEL)
    return _SIGNATURE + _chunk(b"IHDR", ihdr) + _chunk(b"IDAT", idat) + _chunk(b"IEND", b"")


def _unfilter(raw: bytes, h: int, w: int, channels: int) -> np.ndarray:
    stride = w * channels
    out = np.zeros((h, stride), dtype=np.uint8)
    pos = 0
    prev = np.zeros(stride, dtype=np.int32)
    for r in range(h):
        ftype = raw[pos]
        pos += 1
        line = np.frombuffer(raw, dtype=np.uint8, count=stride, offset=pos).astype(np.int32)
        pos += stride
        if ftype == 0:
            cur = line
        elif ftype == 1:  # Sub
            cur = line.copy()
            for i in range(channels, stride):
                cur[i] = (cur[i] + cur[i - channels]) & 0xFF
        elif ftype == 2:  # Up
            cur = (line + prev) & 0xFF
        elif ftype == 3:  # Average
            cur = line.copy()
            for i in range(stride):
                left = cur[i - channels] if i >= channels else 0
                cur[i] = (cur[i] + (left + prev[i]) // 2) & 0xFF
        elif ftype == 4:  # Paeth
            cur = line.copy()
            for i in range(stride):
                a = cur[i - channels] if i >= channels else 0
                b = prev[i]
                c = prev[i - channels] if i >= channels else 0
                p = a + b - c
                pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
                pred = a if (pa <= pb and pa <= pc) else (b if pb <= pc else c)
                cur[i] = (cur[i] + pred) & 0xFF
        else:
            raise ValueError(f"unsupported PNG filter type {ftype}")
        out[r] = cur.astype(np.uint8)
        prev = cur
    return out.reshape((h, w, channels)) if channels > 1 else out.reshape((h, w))


def read_png(data: bytes) -> np.ndarray:
    """Decode an 8-bit non-interlaced grayscale or RGB PNG."""
    if data[:8] != _SIGNATURE:
        raise ValueError("not a PNG file")
    pos = 8
    width = height = color_type = None
    idat = bytearray()
    while pos + 8 <= len(data):
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        tag = data[pos + 4 : pos + 8]
        payload = data[pos + 8 : pos + 8 + length]
        pos += 12 + length
        if tag == b"IHDR":
            width, height, depth, color_type, _, _, interlace = struct.unpack(">IIBBBBB", payload)
            if depth != 8 or interlace != 0 or color_type not in (0, 2):
                raise ValueError("unsupported PNG variant")
        elif tag == b"IDAT":
            idat.extend(payload)
        elif tag == b"IEND":
            break
    if width is None:
        raise ValueError("missing IHDR")
    channels = 3 if color_type == 2 else 1
    raw = zlib.decompress(bytes(idat))
    expected = height * (width * channels + 1)
    if len(raw) != expected:
        raise ValueError("PNG pixel data has wrong length")
    return _unfilter(raw, height, width, channels)
