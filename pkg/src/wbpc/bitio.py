"""MSB-first bit packing.

Single convention for the whole block format: bits are written most
significant first into bytes, multi-bit fields are big endian, and the
final byte is zero padded.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, TruncationError


class BitWriter:
    """Accumulates bit fields and bulk bit arrays, packs to bytes at the end."""

    def __init__(self) -> None:
        self._chunks: list[np.ndarray] = []
        self._nbits = 0

    @property
    def bit_length(self) -> int:
        return self._nbits

    def write(self, value: int, nbits: int) -> None:
        """Append the lowest `nbits` of `value`, most significant bit first."""
        if nbits < 0:
            raise DomainError("negative field width")
        if value < 0 or (nbits < value.bit_length()):
            raise DomainError(f"value {value} does not fit in {nbits} bits")
        if nbits == 0:
            return
        shifts = np.arange(nbits - 1, -1, -1, dtype=np.uint64)
        bits = ((value >> shifts) & 1).astype(np.uint8)
        self._chunks.append(bits)
        self._nbits += nbits

    def write_bit_array(self, bits: np.ndarray) -> None:
        """Append a 1-D array of 0/1 values."""
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise DomainError("bit array must be 1-D")
        self._chunks.append(bits)
        self._nbits += bits.size

    def to_bytes(self) -> bytes:
        if not self._chunks:
            return b""
        return np.packbits(np.concatenate(self._chunks)).tobytes()


class BitReader:
    """Reads MSB-first bit fields from a bytes-like buffer."""

    def __init__(self, data: bytes | np.ndarray, start_bit: int = 0) -> None:
        self._data = np.frombuffer(bytes(data), dtype=np.uint8)
        self._nbits = self._data.size * 8
        if not 0 <= start_bit <= self._nbits:
            raise DomainError("start bit outside buffer")
        self._pos = start_bit

    @property
    def bit_position(self) -> int:
        return self._pos

    @property
    def bits_remaining(self) -> int:
        return self._nbits - self._pos

    def seek(self, bit: int) -> None:
        if not 0 <= bit <= self._nbits:
            raise DomainError("seek outside buffer")
        self._pos = bit

    def read(self, nbits: int) -> int:
        """Read `nbits` as a big-endian unsigned integer."""
        if nbits < 0:
            raise DomainError("negative field width")
        if self._pos + nbits > self._nbits:
            raise TruncationError(f"need {nbits} bits, {self.bits_remaining} left")
        if nbits == 0:
            return 0
        start_byte = self._pos >> 3
        end_byte = (self._pos + nbits + 7) >> 3
        word = int.from_bytes(self._data[start_byte:end_byte].tobytes(), "big")
        trailing = end_byte * 8 - (self._pos + nbits)
        self._pos += nbits
        return (word >> trailing) & ((1 << nbits) - 1)

    def read_bit_array(self, nbits: int) -> np.ndarray:
        """Read `nbits` as a uint8 array of 0/1 values."""
        if self._pos + nbits > self._nbits:
            raise TruncationError(f"need {nbits} bits, {self.bits_remaining} left")
        start_byte = self._pos >> 3
        end_byte = (self._pos + nbits + 7) >> 3
        bits = np.unpackbits(self._data[start_byte:end_byte])
        offset = self._pos - start_byte * 8
        self._pos += nbits
        return bits[offset:offset + nbits]
