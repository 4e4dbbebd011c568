"""Bit-packed compressed block: header, seek table and payload.

Normative layout, MSB-first throughout, no internal byte alignment:

    depth          6 bits
    counter_width  5 bits
    zr_symbol      8 bits
    plane masks    depth bits per subband (LL: one mask; high-pass triple:
                   LH, HL, HH masks in that order), plane 0 written first,
                   bit 1 = plane stored
    Huffman tree   preorder bits, absent when no plane is stored
    seek count     16 bits
    seek entries   t bits each, t = floor(log2(slots * w * h / 8)) + 5,
                   bit offsets of each stored plane relative to payload
                   start, in serialization order
    payload        codewords and counters
    padding        zero bits to the next byte boundary
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import entropy
from .bitio import BitReader, BitWriter
from .bitplanes import (
    KIND_HP3,
    KIND_LL,
    CoefficientBlock,
    areas_per_plane,
    deserialize_block,
    plane_slot_order,
    serialize_block,
)
from .errors import BlockParseError, CorruptionError, DomainError, TruncationError

DEPTH_BITS = 6
COUNTER_WIDTH_BITS = 5
ZR_SYMBOL_BITS = 8
SEEK_COUNT_BITS = 16


def seek_entry_bits(width: int, height: int, depth: int, kind: str) -> int:
    """Seek pointer width from the pre-masking plane slot count."""
    nsub = 1 if kind == KIND_LL else 3
    slots = depth * nsub
    total_areas = slots * width * height // 8
    return (total_areas.bit_length() - 1) + 5


def _plan_stream(
    symbols: np.ndarray, boundaries: np.ndarray
) -> tuple[int, int, entropy.HuffmanCode, np.ndarray, np.ndarray, np.ndarray]:
    """Pick zero-run parameters and build the final Huffman code.

    The counter-width objective needs the zero-run codeword length, which
    needs the code, which needs chunk counts: a provisional code built
    with one chunk per run supplies the codeword length, then the final
    code is rebuilt with the real chunk counts.
    """
    stream = entropy.SymbolStream(symbols=symbols, plane_boundaries=boundaries)
    zr = entropy.select_zr_symbol(stream)
    run_starts, run_lens = entropy._segment_runs(symbols, boundaries)

    if run_lens.size == 0:
        width = entropy.MIN_COUNTER_WIDTH
    else:
        raw = np.bincount(symbols, minlength=256).astype(np.int64)
        zeros_in_runs = int(run_lens.sum())
        provisional = raw.copy()
        provisional[0] -= zeros_in_runs
        provisional[zr] += run_lens.size
        zr_bits = int(entropy.build_huffman(provisional).code_lengths[zr])
        width = entropy.optimize_counter_width(run_lens, zr_bits)

    cap = (1 << width) - 1
    tok_sym, tok_counter, tok_seg = entropy.tokenize(symbols, boundaries, zr, cap)
    code = entropy.build_huffman(entropy.token_frequencies(tok_sym))
    return zr, width, code, tok_sym, tok_counter, tok_seg


def encode_block(block: CoefficientBlock) -> bytes:
    """Serialize, drop all-zero planes, entropy code, emit the block bytes."""
    stream = serialize_block(block)
    per_plane = areas_per_plane(block.width, block.height)
    slots = plane_slot_order(block.kind, block.depth)
    rows = stream.symbols.reshape(len(slots), per_plane)
    stored = np.array([bool(r.any()) for r in rows])

    if stored.any():
        kept = rows[stored].reshape(-1)
        boundaries = np.arange(int(stored.sum()), dtype=np.int64) * per_plane
        zr, width, code, tok_sym, tok_counter, tok_seg = _plan_stream(kept, boundaries)
        payload, offsets = entropy.pack_tokens(
            tok_sym, tok_counter, tok_seg, int(stored.sum()), width, code
        )
    else:
        zr, width, code = 0, entropy.MIN_COUNTER_WIDTH, None
        payload = np.empty(0, dtype=np.uint8)
        offsets = np.empty(0, dtype=np.int64)

    writer = BitWriter()
    writer.write(block.depth, DEPTH_BITS)
    writer.write(width, COUNTER_WIDTH_BITS)
    writer.write(zr, ZR_SYMBOL_BITS)
    nsub = block.subband_count
    for s in range(nsub):
        for b in range(block.depth):
            slot = b * nsub + s
            writer.write(int(stored[slot]), 1)
    if code is not None:
        entropy.write_tree(code, writer)
    writer.write(int(stored.sum()), SEEK_COUNT_BITS)
    t = seek_entry_bits(block.width, block.height, block.depth, block.kind)
    for off in offsets.tolist():
        writer.write(int(off), t)
    writer.write_bit_array(payload)
    return writer.to_bytes()


@dataclass
class BlockHeader:
    """Parsed header fields plus the bit geometry needed to slice payloads."""

    width: int
    height: int
    kind: str
    depth: int
    counter_width: int
    zr_symbol: int
    masks: np.ndarray          # (nsub, depth) uint8
    code: entropy.HuffmanCode | None
    seek_entries: np.ndarray   # int64
    payload_start: int         # absolute bit position in the block

    @property
    def stored_slots(self) -> list[tuple[int, int]]:
        """(subband, plane) pairs actually stored, in serialization order."""
        nsub = self.masks.shape[0]
        return [
            (s, b)
            for b in range(self.depth)
            for s in range(nsub)
            if self.masks[s, b]
        ]


def parse_header(data: bytes, width: int, height: int, kind: str) -> BlockHeader:
    """Read every header field; payload bits follow at `payload_start`."""
    if kind not in (KIND_LL, KIND_HP3):
        raise DomainError(f"unknown block kind {kind!r}")
    nsub = 1 if kind == KIND_LL else 3
    reader = BitReader(data)
    try:
        depth = reader.read(DEPTH_BITS)
        if depth < 1:
            raise BlockParseError("plane depth must be >= 1")
        counter_width = reader.read(COUNTER_WIDTH_BITS)
        zr_symbol = reader.read(ZR_SYMBOL_BITS)
        masks = np.zeros((nsub, depth), dtype=np.uint8)
        for s in range(nsub):
            for b in range(depth):
                masks[s, b] = reader.read(1)
        stored_count = int(masks.sum())
        code = entropy.read_tree(reader) if stored_count else None
        seek_count = reader.read(SEEK_COUNT_BITS)
        if seek_count != stored_count:
            raise CorruptionError(
                f"seek count {seek_count} != stored planes {stored_count}"
            )
        t = seek_entry_bits(width, height, depth, kind)
        entries = np.empty(seek_count, dtype=np.int64)
        for i in range(seek_count):
            entries[i] = reader.read(t)
        if seek_count and (np.diff(entries) < 0).any():
            raise CorruptionError("seek entries must be non-decreasing")
    except TruncationError as exc:
        raise BlockParseError("block header truncated") from exc
    return BlockHeader(
        width=width,
        height=height,
        kind=kind,
        depth=depth,
        counter_width=counter_width,
        zr_symbol=zr_symbol,
        masks=masks,
        code=code,
        seek_entries=entries,
        payload_start=reader.bit_position,
    )


def decode_block(
    data: bytes,
    width: int,
    height: int,
    kind: str,
    planes_to_keep: int | None = None,
) -> CoefficientBlock:
    """Rebuild the coefficient block, keeping only plane indices < q.

    planes_to_keep counts plane order indices per subband (sign first);
    None keeps everything.  Dropped and masked-empty planes decode as
    zero bits, so truncated magnitudes keep their high bits.
    """
    header = parse_header(data, width, height, kind)
    depth = header.depth
    q = depth if planes_to_keep is None else min(max(planes_to_keep, 0), depth)
    slots = header.stored_slots
    decode_n = sum(1 for (_, b) in slots if b < q)

    per_plane = areas_per_plane(width, height)
    nsub = header.masks.shape[0]
    all_slots = plane_slot_order(kind, depth)
    symbols = np.zeros(len(all_slots) * per_plane, dtype=np.uint8)

    if decode_n:
        seg_lengths = np.full(decode_n, per_plane, dtype=np.int64)
        out = np.empty(decode_n * per_plane, dtype=np.uint8)
        seg_starts = np.empty(decode_n, dtype=np.int64)
        packed = np.frombuffer(data, dtype=np.uint8)
        status, _ = entropy._kernels.decode_tokens(
            packed,
            header.payload_start,
            packed.size * 8,
            header.code.left,
            header.code.right,
            header.code.leaf_symbol,
            header.zr_symbol,
            header.counter_width,
            seg_lengths,
            out,
            seg_starts,
        )
        if status == entropy._kernels.STATUS_TRUNCATED:
            raise TruncationError("block payload truncated")
        if status == entropy._kernels.STATUS_OVERRUN:
            raise CorruptionError("zero-run counter overflows its plane")
        if not np.array_equal(seg_starts, header.seek_entries[:decode_n]):
            raise CorruptionError("seek entries disagree with decoded plane starts")
        for i, (s, b) in enumerate(slots[:decode_n]):
            slot = b * nsub + s
            symbols[slot * per_plane:(slot + 1) * per_plane] = out[
                i * per_plane:(i + 1) * per_plane
            ]

    block = deserialize_block(symbols, width, height, kind, depth)
    return block


def plane_offsets(
    data: bytes, width: int, height: int, kind: str
) -> list[tuple[tuple[int, int], int]]:
    """((subband, plane), payload bit offset) for every stored plane."""
    header = parse_header(data, width, height, kind)
    return [
        (slot, int(off))
        for slot, off in zip(header.stored_slots, header.seek_entries.tolist())
    ]


def truncate_block(
    data: bytes, width: int, height: int, kind: str, planes_dropped: int
) -> bytes:
    """Cut the payload at the first dropped plane without re-encoding.

    Keeps plane indices < depth - planes_dropped; masks, seek table and
    count are rewritten, retained payload bits are copied verbatim.
    """
    if planes_dropped < 0:
        raise DomainError("planes_dropped must be >= 0")
    if planes_dropped == 0:
        return data
    header = parse_header(data, width, height, kind)
    q = max(header.depth - planes_dropped, 0)
    slots = header.stored_slots
    keep_n = sum(1 for (_, b) in slots if b < q)
    if keep_n == len(slots):
        return data

    cut = int(header.seek_entries[keep_n]) if keep_n < len(slots) else None
    reader = BitReader(data)
    reader.seek(header.payload_start)
    payload_bits = reader.read_bit_array(cut) if cut is not None else None

    writer = BitWriter()
    writer.write(header.depth, DEPTH_BITS)
    writer.write(header.counter_width, COUNTER_WIDTH_BITS)
    writer.write(header.zr_symbol, ZR_SYMBOL_BITS)
    nsub = header.masks.shape[0]
    for s in range(nsub):
        for b in range(header.depth):
            writer.write(int(header.masks[s, b]) if b < q else 0, 1)
    if keep_n and header.code is not None:
        entropy.write_tree(header.code, writer)
    writer.write(keep_n, SEEK_COUNT_BITS)
    t = seek_entry_bits(width, height, header.depth, kind)
    for off in header.seek_entries[:keep_n].tolist():
        writer.write(int(off), t)
    if payload_bits is not None:
        writer.write_bit_array(payload_bits)
    return writer.to_bytes()
