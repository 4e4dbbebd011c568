"""Zero-run + Huffman entropy coding of area-symbol streams.

Zero runs (two or more consecutive zero symbols, never crossing a plane
boundary) are replaced by the zero-run symbol followed by a fixed-width
big-endian counter; counter 0 escapes a literal occurrence of the zero-run
symbol itself.  Everything else is Huffman coded with a deterministic
tree.
"""

from __future__ import annotations

import heapq
import sys
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bitio import BitReader, BitWriter
from .errors import (
    CodeLengthError,
    DomainError,
    EmptyAlphabetError,
    MalformedPayloadError,
    MalformedTreeError,
    TruncationError,
)

MAX_CODE_BITS = 32
MIN_COUNTER_WIDTH = 2
MAX_COUNTER_WIDTH = 16


@dataclass
class SymbolStream:
    """Byte symbols plus the start index of every bitplane segment."""

    symbols: np.ndarray
    plane_boundaries: np.ndarray

    def __post_init__(self) -> None:
        self.symbols = np.asarray(self.symbols, dtype=np.uint8)
        self.plane_boundaries = np.asarray(self.plane_boundaries, dtype=np.int64)
        b = self.plane_boundaries
        if b.size == 0 or b[0] != 0:
            raise DomainError("plane boundaries must start at 0")
        if b.size > 1 and not (np.diff(b) > 0).all():
            raise DomainError("plane boundaries must be strictly increasing")
        if b[-1] > self.symbols.size:
            raise DomainError("plane boundary beyond stream end")

    @property
    def segment_count(self) -> int:
        return int(self.plane_boundaries.size)

    def segment_lengths(self) -> np.ndarray:
        ends = np.append(self.plane_boundaries[1:], self.symbols.size)
        return ends - self.plane_boundaries


@dataclass
class RunLengthPlan:
    """Chosen zero-run parameters for one stream."""

    zr_symbol: int
    counter_width: int
    run_lengths: np.ndarray
    run_histogram: np.ndarray  # index i = runs whose length needs i bits
    zr_codeword_length: int
    block_size_exponent: int = MAX_COUNTER_WIDTH


class HuffmanCode:
    """Prefix code over byte symbols with its decode tree.

    The tree is kept as flat arrays (left/right child, leaf symbol) which
    both the serializer and the decode kernel consume directly.
    """

    def __init__(self, left: np.ndarray, right: np.ndarray, leaf_symbol: np.ndarray):
        self.left = np.asarray(left, dtype=np.int32)
        self.right = np.asarray(right, dtype=np.int32)
        self.leaf_symbol = np.asarray(leaf_symbol, dtype=np.int32)
        self.code_values = np.zeros(256, dtype=np.uint32)
        self.code_lengths = np.full(256, -1, dtype=np.int16)
        self._assign_codes()

    def _assign_codes(self) -> None:
        stack = [(0, 0, 0)]  # node, code, length
        while stack:
            node, code, length = stack.pop()
            if self.left[node] == -1:
                sym = int(self.leaf_symbol[node])
                self.code_values[sym] = code
                self.code_lengths[sym] = length
                continue
            if length >= MAX_CODE_BITS:
                raise CodeLengthError(f"codeword longer than {MAX_CODE_BITS} bits")
            stack.append((int(self.left[node]), code << 1, length + 1))
            stack.append((int(self.right[node]), (code << 1) | 1, length + 1))

    @property
    def symbols(self) -> np.ndarray:
        return np.flatnonzero(self.code_lengths >= 0)

    def codeword(self, symbol: int) -> tuple[int, int]:
        """(value, bit length) for a symbol present in the code."""
        length = int(self.code_lengths[symbol])
        if length < 0:
            raise DomainError(f"symbol {symbol} not in code")
        return int(self.code_values[symbol]), length

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, HuffmanCode)
            and np.array_equal(self.left, other.left)
            and np.array_equal(self.right, other.right)
            and np.array_equal(self.leaf_symbol, other.leaf_symbol)
        )


def find_zero_runs(stream: SymbolStream) -> list[tuple[int, int]]:
    """Maximal runs of >= 2 zero symbols, split at plane boundaries."""
    runs: list[tuple[int, int]] = []
    starts, lengths = _segment_runs(stream.symbols, stream.plane_boundaries)
    for s, n in zip(starts.tolist(), lengths.tolist()):
        runs.append((s, n))
    return runs


def _segment_runs(
    symbols: np.ndarray, boundaries: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized run finder honoring segment boundaries."""
    n = symbols.size
    if n == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    z = symbols == 0
    seg_id = np.searchsorted(boundaries, np.arange(n), side="right")
    prev_z = np.empty(n, dtype=bool)
    prev_z[0] = False
    prev_z[1:] = z[:-1]
    seg_break = np.empty(n, dtype=bool)
    seg_break[0] = True
    seg_break[1:] = seg_id[1:] != seg_id[:-1]
    start_mask = z & (~prev_z | seg_break)
    starts = np.flatnonzero(start_mask)
    if starts.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    run_id = np.cumsum(start_mask) - 1
    lengths = np.bincount(run_id[z], minlength=starts.size)
    keep = lengths >= 2
    return starts[keep].astype(np.int64), lengths[keep].astype(np.int64)


def select_zr_symbol(stream: SymbolStream) -> int:
    """Least frequent byte value in the stream; ties go to the smallest value."""
    counts = np.bincount(stream.symbols, minlength=256)
    return int(np.argmin(counts))


def run_length_histogram(run_lengths: np.ndarray) -> np.ndarray:
    """Histogram over the bit count needed to store each run length."""
    hist = np.zeros(MAX_COUNTER_WIDTH + 1, dtype=np.int64)
    for n in np.asarray(run_lengths, dtype=np.int64):
        bits = int(n).bit_length()
        hist[min(bits, MAX_COUNTER_WIDTH)] += 1
    return hist


def optimize_counter_width(
    run_lengths: np.ndarray | list[int],
    zr_code_bits: int,
    max_width: int = MAX_COUNTER_WIDTH,
) -> int:
    """Counter width minimizing the exact emitted bits for these runs.

    A run of length L is chunked greedily into ceil(L / (2^w - 1)) pieces,
    each costing the zero-run codeword plus a w-bit counter.  Ties break
    to the smaller width.
    """
    if max_width < MIN_COUNTER_WIDTH:
        raise DomainError(f"max width must be >= {MIN_COUNTER_WIDTH}")
    runs = np.asarray(run_lengths, dtype=np.int64)
    if runs.size == 0:
        return MIN_COUNTER_WIDTH
    widths = np.arange(MIN_COUNTER_WIDTH, max_width + 1, dtype=np.int64)
    caps = (1 << widths) - 1
    chunks = -(-runs[:, None] // caps[None, :])
    costs = (chunks * (widths + zr_code_bits)[None, :]).sum(axis=0)
    return int(widths[np.argmin(costs)])


def build_huffman(frequencies: dict[int, int] | np.ndarray) -> HuffmanCode:
    """Deterministic Huffman build.

    Merge priority is (frequency, smallest contained symbol); the lower
    priority subtree becomes the left child (bit 0).  One distinct symbol
    yields a single leaf with a zero-length codeword.
    """
    if isinstance(frequencies, dict):
        freq = np.zeros(256, dtype=np.int64)
        for sym, f in frequencies.items():
            freq[sym] = f
    else:
        freq = np.zeros(256, dtype=np.int64)
        arr = np.asarray(frequencies, dtype=np.int64)
        freq[: arr.size] = arr
    present = np.flatnonzero(freq > 0)
    if present.size == 0:
        raise EmptyAlphabetError("no symbol has a nonzero frequency")

    # heap entries: (frequency, min symbol, tree); trees are (sym,) leaves
    # or (left, right) pairs, turned into flat arrays afterwards
    heap: list[tuple[int, int, tuple]] = [
        (int(freq[s]), int(s), (int(s),)) for s in present
    ]
    heapq.heapify(heap)
    while len(heap) > 1:
        f1, m1, t1 = heapq.heappop(heap)
        f2, m2, t2 = heapq.heappop(heap)
        heapq.heappush(heap, (f1 + f2, min(m1, m2), (t1, t2)))
    root = heap[0][2]

    left: list[int] = []
    right: list[int] = []
    sym: list[int] = []

    def add(node: tuple) -> int:
        idx = len(left)
        left.append(-1)
        right.append(-1)
        sym.append(-1)
        if len(node) == 1:
            sym[idx] = node[0]
        else:
            left[idx] = add(node[0])
            right[idx] = add(node[1])
        return idx

    # preorder flattening; depth is bounded by the byte alphabet (<= 255)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 2048))
    try:
        add(root)
    finally:
        sys.setrecursionlimit(old)
    return HuffmanCode(np.array(left), np.array(right), np.array(sym))


def serialize_tree(code: HuffmanCode) -> np.ndarray:
    """Preorder bits: 0 = internal node, 1 followed by 8 symbol bits = leaf."""
    writer = BitWriter()
    write_tree(code, writer)
    reader = BitReader(writer.to_bytes())
    return reader.read_bit_array(writer.bit_length)


def write_tree(code: HuffmanCode, writer: BitWriter) -> None:
    stack = [0]
    while stack:
        node = stack.pop()
        if code.left[node] == -1:
            writer.write(1, 1)
            writer.write(int(code.leaf_symbol[node]), 8)
        else:
            writer.write(0, 1)
            stack.append(int(code.right[node]))
            stack.append(int(code.left[node]))


def read_tree(reader: BitReader) -> HuffmanCode:
    """Parse a preorder tree from the reader, consuming exactly its bits."""
    left: list[int] = []
    right: list[int] = []
    sym: list[int] = []
    pending: list[int] = []
    seen: set[int] = set()
    first = True
    try:
        while first or pending:
            first = False
            bit = reader.read(1)
            idx = len(left)
            if idx > 511:
                raise MalformedTreeError("tree larger than a byte alphabet allows")
            if bit:
                s = reader.read(8)
                if s in seen:
                    raise MalformedTreeError(f"duplicate leaf symbol {s}")
                seen.add(s)
                left.append(-1)
                right.append(-1)
                sym.append(s)
            else:
                left.append(-2)
                right.append(-2)
                sym.append(-1)
            if idx > 0:
                parent = pending[-1]
                if left[parent] == -2:
                    left[parent] = idx
                else:
                    right[parent] = idx
                    pending.pop()
            if not bit:
                pending.append(idx)
    except TruncationError as exc:
        raise MalformedTreeError("truncated tree encoding") from exc
    return HuffmanCode(np.array(left), np.array(right), np.array(sym))


def parse_tree(bits: np.ndarray | list[int]) -> HuffmanCode:
    """Exact inverse of serialize_tree; rejects trailing bits."""
    bits = np.asarray(bits, dtype=np.uint8)
    data = np.packbits(bits).tobytes()
    reader = BitReader(data)
    code = read_tree(reader)
    if reader.bit_position != bits.size:
        raise MalformedTreeError("trailing bits after tree encoding")
    return code


def tokenize(
    symbols: np.ndarray,
    boundaries: np.ndarray,
    zr_symbol: int,
    counter_cap: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Turn a segmented stream into emission tokens.

    Returns (token symbol, counter, segment id) arrays.  counter is -1 for
    a plain codeword, 0 for a literal zero-run symbol escape, else the
    chunk length.  Runs are chunked greedily at `counter_cap`.
    """
    run_starts, run_lens = _segment_runs(symbols, boundaries)
    covered = np.zeros(symbols.size, dtype=bool)
    if run_starts.size:
        marks = np.zeros(symbols.size + 1, dtype=np.int64)
        marks[run_starts] += 1
        marks[run_starts + run_lens] -= 1
        covered = np.cumsum(marks[:-1]) > 0

    ordinary_pos = np.flatnonzero(~covered)
    ord_sym = symbols[ordinary_pos].astype(np.int32)
    ord_counter = np.where(ord_sym == zr_symbol, 0, -1).astype(np.int64)

    if run_starts.size:
        chunks = -(-run_lens // counter_cap)
        total_chunks = int(chunks.sum())
        run_of_chunk = np.repeat(np.arange(run_starts.size), chunks)
        cum = np.cumsum(chunks) - chunks
        chunk_idx = np.arange(total_chunks) - cum[run_of_chunk]
        last = chunk_idx == (chunks[run_of_chunk] - 1)
        values = np.full(total_chunks, counter_cap, dtype=np.int64)
        values[last] = run_lens[run_of_chunk[last]] - counter_cap * (
            chunks[run_of_chunk[last]] - 1
        )
        run_pos = run_starts[run_of_chunk]
        run_sub = chunk_idx
        run_symbols = np.full(total_chunks, zr_symbol, dtype=np.int32)
    else:
        run_pos = np.empty(0, dtype=np.int64)
        run_sub = np.empty(0, dtype=np.int64)
        values = np.empty(0, dtype=np.int64)
        run_symbols = np.empty(0, dtype=np.int32)

    # order tokens by position; chunk pairs of one run keep their sub-order
    max_sub = symbols.size + 1
    keys = np.concatenate([ordinary_pos * max_sub, run_pos * max_sub + 1 + run_sub])
    tok_sym = np.concatenate([ord_sym, run_symbols])
    tok_counter = np.concatenate([ord_counter, values])
    order = np.argsort(keys, kind="stable")
    tok_sym = tok_sym[order]
    tok_counter = tok_counter[order]
    pos = np.concatenate([ordinary_pos, run_pos])[order]
    seg_of_pos = np.searchsorted(boundaries, pos, side="right") - 1
    return tok_sym, tok_counter, seg_of_pos.astype(np.int64)


def token_frequencies(tok_sym: np.ndarray) -> np.ndarray:
    return np.bincount(tok_sym, minlength=256).astype(np.int64)


def pack_tokens(
    tok_sym: np.ndarray,
    tok_counter: np.ndarray,
    tok_seg: np.ndarray,
    n_segments: int,
    counter_width: int,
    code: HuffmanCode,
) -> tuple[np.ndarray, np.ndarray]:
    """Emit codewords and counters as a bit array plus per-segment offsets."""
    if tok_sym.size and int(code.code_lengths[tok_sym].min()) < 0:
        missing = tok_sym[code.code_lengths[tok_sym] < 0][0]
        raise DomainError(f"symbol {int(missing)} has no codeword")
    lens = np.zeros(2 * tok_sym.size, dtype=np.int64)
    vals = np.zeros(2 * tok_sym.size, dtype=np.int64)
    lens[0::2] = code.code_lengths[tok_sym]
    vals[0::2] = code.code_values[tok_sym]
    has_counter = tok_counter >= 0
    lens[1::2] = np.where(has_counter, counter_width, 0)
    vals[1::2] = np.where(has_counter, tok_counter, 0)

    total = int(lens.sum())
    starts = np.cumsum(lens) - lens
    rep = np.repeat(np.arange(lens.size), lens)
    within = np.arange(total) - np.repeat(starts, lens)
    shift = lens[rep] - 1 - within
    bits = ((vals[rep] >> shift) & 1).astype(np.uint8)

    if tok_sym.size == 0:
        return bits, np.zeros(n_segments, dtype=np.int64)
    token_starts = starts[0::2]
    first_tok = np.searchsorted(tok_seg, np.arange(n_segments), side="left")
    seg_offsets = np.where(
        first_tok < tok_sym.size,
        token_starts[np.minimum(first_tok, tok_sym.size - 1)],
        total,
    ).astype(np.int64)
    return bits, seg_offsets


def encode_stream(
    stream: SymbolStream,
    zr_symbol: int,
    counter_width: int,
    code: HuffmanCode,
) -> tuple[np.ndarray, np.ndarray]:
    """Encode a stream; returns (payload bits, per-plane bit offsets)."""
    if not MIN_COUNTER_WIDTH <= counter_width <= MAX_COUNTER_WIDTH:
        raise DomainError(f"counter width outside [{MIN_COUNTER_WIDTH}, {MAX_COUNTER_WIDTH}]")
    cap = (1 << counter_width) - 1
    tok_sym, tok_counter, tok_seg = tokenize(
        stream.symbols, stream.plane_boundaries, zr_symbol, cap
    )
    return pack_tokens(
        tok_sym, tok_counter, tok_seg, stream.segment_count, counter_width, code
    )


def decode_stream(
    payload: bytes | np.ndarray,
    code: HuffmanCode,
    zr_symbol: int,
    counter_width: int,
    counts: np.ndarray | list[int],
    start_bit: int = 0,
    end_bit: int | None = None,
) -> SymbolStream:
    """Exact inverse of encode_stream given per-plane symbol counts.

    `payload` is packed bytes, or a 0/1 bit array which is packed first.
    """
    if isinstance(payload, (bytes, bytearray)):
        packed = np.frombuffer(bytes(payload), dtype=np.uint8)
        total_bits = packed.size * 8 if end_bit is None else end_bit
    else:
        bits = np.asarray(payload, dtype=np.uint8)
        packed = np.packbits(bits)
        total_bits = bits.size if end_bit is None else end_bit
    seg_lengths = np.asarray(counts, dtype=np.int64)
    out = np.empty(int(seg_lengths.sum()), dtype=np.uint8)
    seg_starts = np.empty(seg_lengths.size, dtype=np.int64)
    status, _ = _kernels.decode_tokens(
        packed,
        start_bit,
        total_bits,
        code.left,
        code.right,
        code.leaf_symbol,
        zr_symbol,
        counter_width,
        seg_lengths,
        out,
        seg_starts,
    )
    if status == _kernels.STATUS_TRUNCATED:
        raise TruncationError("payload ended before all symbols were decoded")
    if status == _kernels.STATUS_OVERRUN:
        raise MalformedPayloadError("zero-run counter overflows its plane")
    boundaries = np.cumsum(seg_lengths) - seg_lengths
    return SymbolStream(symbols=out, plane_boundaries=boundaries)
