"""Whole-image container: tiled pyramid of compressed blocks with an index.

Layout (little-endian integers):

    magic    4 bytes  "WBPC"
    version  u8       1
    width    u32      image width in pixels
    height   u32
    channels u8
    bit_depth u8
    color    u8       0 = none, 1 = reversible color transform
    levels   u8
    block_dim u16     tile edge, 128
    index    one (offset u64, length u32) pair per block slot
    blocks   compressed block bytes, in index order

Block slots are enumerated per channel: the LL grid of the deepest level
first, then the high-pass grids from the deepest level down to level 1,
each grid row major.  Grid dimensions at level k derive from the LL dims
at that level, so the reader can rebuild the whole index layout from the
header alone.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import blocks as blockcodec
from .bitplanes import KIND_HP3, KIND_LL, CoefficientBlock
from .errors import (
    ContainerParseError,
    CorruptionError,
    DomainError,
    LevelRangeError,
    UnsupportedLayoutError,
)
from .transforms import (
    RasterImage,
    SubbandPyramid,
    _merge_plane,
    default_levels,
    dwt2d_forward,
    level_dims,
    rct_forward,
    rct_inverse,
)

MAGIC = b"WBPC"
VERSION = 1
BLOCK_DIM = 128
COLOR_NONE = 0
COLOR_RCT = 1

_HEADER = struct.Struct("<4sBIIBBBBH")
_INDEX_ENTRY = struct.Struct("<QI")

# 5/3 synthesis support reaches 2 coefficients; boxes are padded a little
# wider so buffer-edge extension artifacts never touch wanted samples
_REGION_MARGIN = 4


@dataclass
class ContainerHeader:
    width: int
    height: int
    channels: int
    bit_depth: int
    color_transform: int
    levels: int
    block_dim: int = BLOCK_DIM

    def pack(self) -> bytes:
        return _HEADER.pack(
            MAGIC,
            VERSION,
            self.width,
            self.height,
            self.channels,
            self.bit_depth,
            self.color_transform,
            self.levels,
            self.block_dim,
        )

    @classmethod
    def parse(cls, data: bytes) -> "ContainerHeader":
        if len(data) < _HEADER.size:
            raise ContainerParseError("container shorter than its header")
        magic, version, w, h, c, depth, color, levels, dim = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ContainerParseError(f"bad magic {magic!r}")
        if version != VERSION:
            raise ContainerParseError(f"unsupported version {version}")
        if w < 1 or h < 1 or not 1 <= c <= 4 or dim < 8:
            raise ContainerParseError("invalid header geometry")
        return cls(
            width=w,
            height=h,
            channels=c,
            bit_depth=depth,
            color_transform=color,
            levels=levels,
            block_dim=dim,
        )


def _grid_dims(w: int, h: int, block_dim: int) -> tuple[int, int]:
    return (-(-w // block_dim), -(-h // block_dim))


def iter_slots(header: ContainerHeader):
    """Yield (kind, channel, level, grid row, grid col) in index order."""
    L = header.levels
    for c in range(header.channels):
        lw, lh = level_dims(header.width, header.height, L)
        gw, gh = _grid_dims(lw, lh, header.block_dim)
        for r in range(gh):
            for col in range(gw):
                yield (KIND_LL, c, L, r, col)
        for lev in range(L, 0, -1):
            lw, lh = level_dims(header.width, header.height, lev)
            gw, gh = _grid_dims(lw, lh, header.block_dim)
            for r in range(gh):
                for col in range(gw):
                    yield (KIND_HP3, c, lev, r, col)


def _subband_dims(header: ContainerHeader, level: int) -> dict[str, tuple[int, int]]:
    """True (w, h) of each subband produced by the split at `level`."""
    pw, ph = level_dims(header.width, header.height, level - 1)
    cw, fw = -(-pw // 2), pw // 2  # ceil, floor
    ch, fh = -(-ph // 2), ph // 2
    return {"LL": (cw, ch), "LH": (cw, fh), "HL": (fw, ch), "HH": (fw, fh)}


def _pad_tile(grid: np.ndarray, r0: int, c0: int, dim: int) -> np.ndarray:
    """Tile at (r0, c0), zero padded to dim x dim."""
    tile = np.zeros((dim, dim), dtype=np.int64)
    src = grid[r0:r0 + dim, c0:c0 + dim]
    tile[: src.shape[0], : src.shape[1]] = src
    return tile


def _encode_slot(
    slot: tuple, header: ContainerHeader, pyramids: list[SubbandPyramid]
) -> bytes:
    kind, c, lev, r, col = slot
    dim = header.block_dim
    y0, x0 = r * dim, col * dim
    pyr = pyramids[c]
    if kind == KIND_LL:
        block = CoefficientBlock.build(KIND_LL, [_pad_tile(pyr.ll, y0, x0, dim)])
    else:
        lh, hl, hh = pyr.details[lev - 1]
        block = CoefficientBlock.build(
            KIND_HP3,
            [_pad_tile(lh, y0, x0, dim), _pad_tile(hl, y0, x0, dim),
             _pad_tile(hh, y0, x0, dim)],
        )
    return blockcodec.encode_block(block)


def encode_image(
    image: RasterImage,
    levels: int | None = None,
    use_rct: bool = False,
    threads: int = 1,
) -> bytes:
    """Transform, tile and entropy code a raster image into container bytes."""
    image.validate_source()
    if levels is None:
        levels = default_levels(image.width, image.height)
    if use_rct and image.channels != 3:
        raise UnsupportedLayoutError("color transform needs exactly 3 channels")

    if use_rct:
        planes = list(rct_forward(image))
    else:
        planes = [image.plane(c) for c in range(image.channels)]

    header = ContainerHeader(
        width=image.width,
        height=image.height,
        channels=image.channels,
        bit_depth=image.bit_depth,
        color_transform=COLOR_RCT if use_rct else COLOR_NONE,
        levels=levels,
    )
    pyramids = [dwt2d_forward(p, levels) for p in planes]
    slots = list(iter_slots(header))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blobs = list(pool.map(lambda s: _encode_slot(s, header, pyramids), slots))
    else:
        blobs = [_encode_slot(s, header, pyramids) for s in slots]

    index = bytearray()
    offset = _HEADER.size + _INDEX_ENTRY.size * len(slots)
    for blob in blobs:
        index += _INDEX_ENTRY.pack(offset, len(blob))
        offset += len(blob)
    return header.pack() + bytes(index) + b"".join(blobs)


class ContainerReader:
    """Random access into a container byte string; safe to share read-only."""

    def __init__(self, data: bytes) -> None:
        self.data = bytes(data)
        self.header = ContainerHeader.parse(self.data)
        self.slots = list(iter_slots(self.header))
        n = len(self.slots)
        need = _HEADER.size + _INDEX_ENTRY.size * n
        if len(self.data) < need:
            raise ContainerParseError("container shorter than its index")
        self.index: dict[tuple, tuple[int, int]] = {}
        prev_end = need
        for i, slot in enumerate(self.slots):
            off, length = _INDEX_ENTRY.unpack_from(
                self.data, _HEADER.size + i * _INDEX_ENTRY.size
            )
            if off < prev_end or off + length > len(self.data):
                raise CorruptionError("index entry outside file or overlapping")
            prev_end = off + length
            self.index[slot] = (off, length)

    def block_bytes(self, slot: tuple) -> bytes:
        off, length = self.index[slot]
        return self.data[off:off + length]

    def decode_slot(self, slot: tuple, planes_dropped: int = 0) -> CoefficientBlock:
        kind = slot[0]
        data = self.block_bytes(slot)
        dim = self.header.block_dim
        if planes_dropped == 0:
            keep = None
        else:
            depth = blockcodec.parse_header(data, dim, dim, kind).depth
            keep = max(depth - planes_dropped, 0)
        return blockcodec.decode_block(data, dim, dim, kind, planes_to_keep=keep)


def _stitch(
    reader: ContainerReader,
    kind: str,
    channel: int,
    level: int,
    box: tuple[int, int, int, int],
    planes_dropped: int,
) -> dict[str, np.ndarray] | np.ndarray:
    """Assemble subband samples covering box = (r0, r1, c0, c1).

    For LL slots returns one array over the box clamped to the LL dims;
    for high-pass slots returns {LH, HL, HH} arrays clamped per subband.
    """
    dim = reader.header.block_dim
    gw_max, gh_max = level_dims(reader.header.width, reader.header.height, level)
    r0, r1, c0, c1 = box
    r1 = min(r1, gh_max)
    c1 = min(c1, gw_max)
    if kind == KIND_LL:
        names = {"LL": (gw_max, gh_max)}
    else:
        dims = _subband_dims(reader.header, level)
        names = {k: dims[k] for k in ("LH", "HL", "HH")}
    out = {
        k: np.zeros((max(min(r1, hh) - r0, 0), max(min(c1, ww) - c0, 0)), dtype=np.int64)
        for k, (ww, hh) in names.items()
    }
    tiles_r = range(r0 // dim, -(-r1 // dim))
    tiles_c = range(c0 // dim, -(-c1 // dim))
    for tr in tiles_r:
        for tc in tiles_c:
            slot = (kind, channel, level, tr, tc)
            if slot not in reader.index:
                continue
            block = reader.decode_slot(slot, planes_dropped)
            grids = dict(zip(("LL",) if kind == KIND_LL else ("LH", "HL", "HH"),
                             block.coeffs))
            for name, grid in grids.items():
                ww, hh = names[name]
                tr0, tc0 = tr * dim, tc * dim
                rr0 = max(r0, tr0)
                rr1 = min(min(r1, hh), tr0 + dim)
                cc0 = max(c0, tc0)
                cc1 = min(min(c1, ww), tc0 + dim)
                if rr0 >= rr1 or cc0 >= cc1:
                    continue
                out[name][rr0 - r0:rr1 - r0, cc0 - c0:cc1 - c0] = grid[
                    rr0 - tr0:rr1 - tr0, cc0 - tc0:cc1 - tc0
                ]
    if kind == KIND_LL:
        return out["LL"]
    return out


def _finish_image(reader: ContainerReader, planes: list[np.ndarray]) -> RasterImage:
    h = reader.header
    if h.color_transform == COLOR_RCT:
        r, g, b = rct_inverse(planes[0], planes[1], planes[2])
        planes = [r, g, b]
    return RasterImage.from_planes(planes, h.bit_depth)


def decode_image(data: bytes, level: int = 0, planes_dropped: int = 0) -> RasterImage:
    """Reconstruct at a resolution level; level 0 is full resolution.

    With level 0 and no planes dropped the result is bit-identical to the
    encoder input.  At level k the samples equal the LL band after k
    forward splits, so reduced-level and quality-reduced outputs can fall
    outside the nominal sample range; writers clamp for display.
    """
    reader = ContainerReader(data)
    h = reader.header
    if not 0 <= level <= h.levels:
        raise LevelRangeError(f"level must be in [0, {h.levels}]")
    if planes_dropped < 0:
        raise DomainError("planes_dropped must be >= 0")

    planes = []
    for c in range(h.channels):
        top_w, top_h = level_dims(h.width, h.height, h.levels)
        ll = _stitch(reader, KIND_LL, c, h.levels, (0, top_h, 0, top_w), planes_dropped)
        for lev in range(h.levels, level, -1):
            lev_w, lev_h = level_dims(h.width, h.height, lev)
            bands = _stitch(
                reader, KIND_HP3, c, lev, (0, lev_h, 0, lev_w), planes_dropped
            )
            ll = _merge_plane(ll, bands["LH"], bands["HL"], bands["HH"])
        planes.append(ll)
    return _finish_image(reader, planes)


def decode_region(
    data: bytes,
    x: int,
    y: int,
    width: int,
    height: int,
    level: int = 0,
    planes_dropped: int = 0,
) -> RasterImage:
    """Decode just the blocks whose synthesis support intersects the rect.

    The rect is in level-`level` pixel space; the result is pixel
    identical to cropping a full decode_image output.
    """
    reader = ContainerReader(data)
    h = reader.header
    if not 0 <= level <= h.levels:
        raise LevelRangeError(f"level must be in [0, {h.levels}]")
    if planes_dropped < 0:
        raise DomainError("planes_dropped must be >= 0")
    lw, lh = level_dims(h.width, h.height, level)
    if width < 1 or height < 1:
        raise DomainError("empty region")
    if x < 0 or y < 0 or x + width > lw or y + height > lh:
        raise DomainError("region outside level dimensions")

    # per-level boxes in LL coordinates, even starts, margin padded
    boxes: dict[int, tuple[int, int, int, int]] = {
        level: (y, y + height, x, x + width)
    }
    for lev in range(level + 1, h.levels + 1):
        pr0, pr1, pc0, pc1 = boxes[lev - 1]
        bw, bh = level_dims(h.width, h.height, lev)
        r0 = max(pr0 // 2 - _REGION_MARGIN, 0) & ~1
        c0 = max(pc0 // 2 - _REGION_MARGIN, 0) & ~1
        r1 = min(-(-pr1 // 2) + _REGION_MARGIN, bh)
        c1 = min(-(-pc1 // 2) + _REGION_MARGIN, bw)
        boxes[lev] = (r0, r1, c0, c1)

    planes = []
    for c in range(h.channels):
        box = boxes[h.levels]
        ll = _stitch(reader, KIND_LL, c, h.levels, box, planes_dropped)
        for lev in range(h.levels, level, -1):
            r0, r1, c0, c1 = boxes[lev]
            bands = _stitch(reader, KIND_HP3, c, lev, (r0, r1, c0, c1), planes_dropped)
            merged = _merge_plane(ll, bands["LH"], bands["HL"], bands["HH"])
            # merged covers parent rows [2*r0, 2*r0 + merged rows)
            wr0, wc0 = 2 * r0, 2 * c0
            tr0, tr1, tc0, tc1 = boxes[lev - 1]
            ll = merged[tr0 - wr0:tr1 - wr0, tc0 - wc0:tc1 - wc0]
        planes.append(ll)
    return _finish_image(reader, planes)


def truncate_stream(data: bytes, planes_dropped: int) -> bytes:
    """Rewrite every block with its least significant planes cut off.

    Retained payload bits are copied verbatim (no entropy decode); the
    output is a valid, smaller container that decodes exactly like
    decode(..., planes_dropped=n).
    """
    if planes_dropped < 0:
        raise DomainError("planes_dropped must be >= 0")
    if planes_dropped == 0:
        return bytes(data)
    reader = ContainerReader(data)
    dim = reader.header.block_dim
    blobs = []
    for slot in reader.slots:
        blob = reader.block_bytes(slot)
        blobs.append(
            blockcodec.truncate_block(blob, dim, dim, slot[0], planes_dropped)
        )
    index = bytearray()
    offset = _HEADER.size + _INDEX_ENTRY.size * len(blobs)
    for blob in blobs:
        index += _INDEX_ENTRY.pack(offset, len(blob))
        offset += len(blob)
    return reader.header.pack() + bytes(index) + b"".join(blobs)


def container_info(data: bytes) -> dict:
    """Header, grid and size statistics for inspection tooling."""
    reader = ContainerReader(data)
    h = reader.header
    levels = []
    for lev in range(h.levels, 0, -1):
        lw, lh = level_dims(h.width, h.height, lev)
        gw, gh = _grid_dims(lw, lh, h.block_dim)
        levels.append(
            {"level": lev, "width": lw, "height": lh, "grid": [gw, gh]}
        )
    depth_hist: dict[int, int] = {}
    header_bits = 0
    payload_bits = 0
    dim = h.block_dim
    for slot in reader.slots:
        blob = reader.block_bytes(slot)
        parsed = blockcodec.parse_header(blob, dim, dim, slot[0])
        depth_hist[parsed.depth] = depth_hist.get(parsed.depth, 0) + 1
        header_bits += parsed.payload_start
        payload_bits += len(blob) * 8 - parsed.payload_start
    return {
        "width": h.width,
        "height": h.height,
        "channels": h.channels,
        "bit_depth": h.bit_depth,
        "color_transform": "rct" if h.color_transform == COLOR_RCT else "none",
        "levels": h.levels,
        "block_dim": h.block_dim,
        "block_count": len(reader.slots),
        "level_grids": levels,
        "depth_histogram": {str(k): v for k, v in sorted(depth_hist.items())},
        "file_bytes": len(reader.data),
        "header_bytes": _HEADER.size + _INDEX_ENTRY.size * len(reader.slots)
        + (header_bits + 7) // 8,
        "payload_bytes": (payload_bits + 7) // 8,
    }
