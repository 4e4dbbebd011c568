"""Token-level decode loop, jitted when numba is available.

The loop is written so the exact same function body runs under plain
CPython when numba is missing; results are identical either way.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


STATUS_OK = 0
STATUS_TRUNCATED = 1
STATUS_OVERRUN = 2


@njit(cache=True)
def decode_tokens(
    payload: np.ndarray,      # uint8 packed bits
    start_bit: int,
    end_bit: int,
    left: np.ndarray,         # int32 child index, -1 at leaves
    right: np.ndarray,        # int32
    leaf_symbol: np.ndarray,  # int32, -1 at internal nodes
    zr_symbol: int,
    counter_width: int,
    seg_lengths: np.ndarray,  # int64 expected symbols per segment
    out_symbols: np.ndarray,  # uint8, sized sum(seg_lengths)
    out_seg_starts: np.ndarray,  # int64, sized len(seg_lengths)
):
    """Huffman + zero-run decode. Returns (status, end bit position)."""
    bitpos = start_bit
    oi = 0
    for s in range(seg_lengths.shape[0]):
        out_seg_starts[s] = bitpos - start_bit
        remaining = seg_lengths[s]
        while remaining > 0:
            node = 0
            while left[node] != -1:
                if bitpos >= end_bit:
                    return STATUS_TRUNCATED, bitpos
                bit = (payload[bitpos >> 3] >> (7 - (bitpos & 7))) & 1
                bitpos += 1
                if bit:
                    node = right[node]
                else:
                    node = left[node]
            value = leaf_symbol[node]
            if value == zr_symbol:
                if bitpos + counter_width > end_bit:
                    return STATUS_TRUNCATED, bitpos
                counter = 0
                for _ in range(counter_width):
                    counter = (counter << 1) | (
                        (payload[bitpos >> 3] >> (7 - (bitpos & 7))) & 1
                    )
                    bitpos += 1
                if counter == 0:
                    out_symbols[oi] = value
                    oi += 1
                    remaining -= 1
                else:
                    if counter > remaining:
                        return STATUS_OVERRUN, bitpos
                    for _ in range(counter):
                        out_symbols[oi] = 0
                        oi += 1
                    remaining -= counter
            else:
                out_symbols[oi] = value
                oi += 1
                remaining -= 1
    return STATUS_OK, bitpos
