"""Minimal 8-bit PNG writer for served tiles (stdlib zlib only)."""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import DomainError


def _chunk(tag: bytes, body: bytes) -> bytes:
    return (
        struct.pack(">I", len(body))
        + tag
        + body
        + struct.pack(">I", zlib.crc32(tag + body) & 0xFFFFFFFF)
    )


def encode_png(pixels: np.ndarray) -> bytes:
    """Encode (h, w) grayscale or (h, w, 3) RGB uint8 pixels."""
    pixels = np.asarray(pixels, dtype=np.uint8)
    if pixels.ndim == 2:
        color_type = 0
        h, w = pixels.shape
        rows = pixels.reshape(h, w)
    elif pixels.ndim == 3 and pixels.shape[2] == 3:
        color_type = 2
        h, w = pixels.shape[:2]
        rows = pixels.reshape(h, w * 3)
    else:
        raise DomainError("expected (h, w) gray or (h, w, 3) RGB")
    ihdr = struct.pack(">IIBBBBB", w, h, 8, color_type, 0, 0, 0)
    # filter byte 0 per scanline
    raw = np.concatenate(
        [np.zeros((h, 1), dtype=np.uint8), rows], axis=1
    ).tobytes()
    idat = zlib.compress(raw, 9)
    return (
        b"\x89PNG\r\n\x1a\n"
        + _chunk(b"IHDR", ihdr)
        + _chunk(b"IDAT", idat)
        + _chunk(b"IEND", b"")
    )
