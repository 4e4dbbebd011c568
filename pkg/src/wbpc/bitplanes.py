"""Signed-magnitude bitplanes and 4x2 constant-area symbols.

A coefficient tile is peeled into bitplanes (sign plane first, then
magnitude bits MSB down to LSB).  Each plane is cut into 4-wide by 2-tall
areas, the areas are walked in a serpentine order, and every area becomes
one byte: top row -> bits 0..3, bottom row -> bits 4..7.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .entropy import SymbolStream
from .errors import (
    DepthOverflowError,
    DomainError,
    ShapeError,
    StreamIndexError,
)

KIND_LL = "ll"
KIND_HP3 = "hp3"
HP3_SUBBANDS = ("LH", "HL", "HH")

MAX_DEPTH = 63

# bit weight of each cell in a 4x2 area: 2^((col - j) + 4*(row - i))
AREA_WEIGHTS = np.array([[1, 2, 4, 8], [16, 32, 64, 128]], dtype=np.uint8)


@dataclass
class CoefficientBlock:
    """One tile of signed wavelet coefficients for one channel.

    kind KIND_LL carries a single grid, KIND_HP3 carries the multiplexed
    (LH, HL, HH) triple.  depth counts stored planes including the sign.
    """

    width: int
    height: int
    kind: str
    depth: int
    coeffs: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if self.kind not in (KIND_LL, KIND_HP3):
            raise DomainError(f"unknown block kind {self.kind!r}")
        expected = 1 if self.kind == KIND_LL else 3
        if len(self.coeffs) != expected:
            raise ShapeError(f"{self.kind} block needs {expected} grids")
        if self.width % 4 or self.height % 2 or self.width < 4 or self.height < 2:
            raise ShapeError("block dims must be positive multiples of (4, 2)")
        if not 1 <= self.depth <= MAX_DEPTH:
            raise DomainError(f"depth must be 1..{MAX_DEPTH}")
        self.coeffs = tuple(np.asarray(g, dtype=np.int64) for g in self.coeffs)
        for g in self.coeffs:
            if g.shape != (self.height, self.width):
                raise ShapeError(f"grid shape {g.shape} != block dims")

    @property
    def subband_count(self) -> int:
        return len(self.coeffs)

    @property
    def plane_slots(self) -> int:
        """Total stored-plane slots: depth per subband."""
        return self.depth * self.subband_count

    @classmethod
    def build(cls, kind: str, grids: list[np.ndarray] | tuple[np.ndarray, ...],
              depth: int | None = None) -> "CoefficientBlock":
        """Make a block, choosing the minimal depth for the data if not given."""
        grids = tuple(np.asarray(g, dtype=np.int64) for g in grids)
        if depth is None:
            peak = max(int(np.abs(g).max(initial=0)) for g in grids)
            depth = 1 + peak.bit_length()
        h, w = grids[0].shape
        return cls(width=w, height=h, kind=kind, depth=depth, coeffs=grids)


@dataclass
class BitplaneCube:
    """Bitplanes of one subband: planes[0] is the sign plane (1 = negative)."""

    planes: np.ndarray  # (depth, h, w) uint8

    @property
    def depth(self) -> int:
        return self.planes.shape[0]

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]


@dataclass(frozen=True)
class AreaCoordinate:
    """Top-left cell (row, col) of a 4x2 area within plane `plane`."""

    row: int
    col: int
    plane: int


def _smr_planes(values: np.ndarray, depth: int) -> np.ndarray:
    mag = np.abs(values)
    if mag.size and int(mag.max()) >= (1 << (depth - 1)):
        raise DepthOverflowError(
            f"coefficient magnitude {int(mag.max())} needs more than {depth - 1} bits"
        )
    planes = np.empty((depth,) + values.shape, dtype=np.uint8)
    planes[0] = values < 0
    for p in range(1, depth):
        planes[p] = (mag >> (depth - 1 - p)) & 1
    return planes


def _planes_to_values(planes: np.ndarray) -> np.ndarray:
    depth = planes.shape[0]
    mag = np.zeros(planes.shape[1:], dtype=np.int64)
    for p in range(1, depth):
        mag |= planes[p].astype(np.int64) << (depth - 1 - p)
    return np.where(planes[0] != 0, -mag, mag)


def to_smr_planes(block: CoefficientBlock) -> tuple[BitplaneCube, ...]:
    """Peel every subband grid of the block into sign + magnitude planes."""
    return tuple(BitplaneCube(_smr_planes(g, block.depth)) for g in block.coeffs)


def from_smr_planes(
    cubes: tuple[BitplaneCube, ...] | list[BitplaneCube], kind: str
) -> CoefficientBlock:
    """Exact inverse of to_smr_planes."""
    grids = tuple(_planes_to_values(c.planes) for c in cubes)
    depth = cubes[0].depth
    h, w = grids[0].shape
    return CoefficientBlock(width=w, height=h, kind=kind, depth=depth, coeffs=grids)


@lru_cache(maxsize=None)
def _area_order(width: int, height: int) -> np.ndarray:
    """Maps per-plane stream index k' to flat area index row*(w/4) + col.

    Full bands of two area rows alternate vertically while sweeping columns
    (the serpentine order); a trailing single area row, present when
    height % 4 == 2, is swept left to right.
    """
    acols = width // 4
    arows = height // 2
    n = arows * acols
    order = np.empty(n, dtype=np.int64)
    per_band = 2 * acols
    full = (arows // 2) * per_band
    kf = np.arange(full)
    band = kf // per_band
    r = 2 * band + (kf % 2)
    c = (kf // 2) % acols
    order[:full] = r * acols + c
    if full < n:
        tail = np.arange(n - full)
        order[full:] = (arows - 1) * acols + tail
    return order


@lru_cache(maxsize=None)
def _area_scatter(width: int, height: int) -> np.ndarray:
    """Inverse permutation of _area_order."""
    order = _area_order(width, height)
    inv = np.empty_like(order)
    inv[order] = np.arange(order.size)
    return inv


def areas_per_plane(width: int, height: int) -> int:
    if width % 4 or height % 2 or width < 4 or height < 2:
        raise ShapeError("area grid needs dims that are multiples of (4, 2)")
    return (width * height) // 8


def area_coordinate(k: int, width: int, height: int, depth: int) -> AreaCoordinate:
    """Map stream position k to the (row, col, plane) of its 4x2 area."""
    per_plane = areas_per_plane(width, height)
    if not 0 <= k < depth * per_plane:
        raise StreamIndexError(f"k={k} outside [0, {depth * per_plane})")
    kp = k % per_plane
    plane = k // per_plane
    acols = width // 4
    arows = height // 2
    per_band = 2 * acols
    full = (arows // 2) * per_band
    if kp < full:
        row = 2 * (kp // per_band) + (kp % 2)
        col = (kp // 2) % acols
    else:
        row = arows - 1
        col = kp - full
    return AreaCoordinate(row=2 * row, col=4 * col, plane=plane)


def area_to_symbol(cube: BitplaneCube, coord: AreaCoordinate) -> int:
    """Pack the 8 bits of one area into a byte, top row in the low nibble."""
    patch = cube.planes[coord.plane, coord.row:coord.row + 2, coord.col:coord.col + 4]
    return int((patch * AREA_WEIGHTS).sum())


def symbol_to_area(symbol: int, cube: BitplaneCube, coord: AreaCoordinate) -> None:
    """Scatter a byte back into its 4x2 area (exact inverse of area_to_symbol)."""
    if not 0 <= symbol <= 255:
        raise DomainError("symbol must fit in a byte")
    bits = (symbol >> np.arange(8, dtype=np.uint8)) & 1
    cube.planes[coord.plane, coord.row:coord.row + 2, coord.col:coord.col + 4] = (
        bits.reshape(2, 4)
    )


def _plane_symbols(bitgrid: np.ndarray) -> np.ndarray:
    """All area symbols of one plane, in serpentine stream order."""
    h, w = bitgrid.shape
    v = bitgrid.reshape(h // 2, 2, w // 4, 4)
    grid = (v * AREA_WEIGHTS[None, :, None, :]).sum(axis=(1, 3)).astype(np.uint8)
    return grid.ravel()[_area_order(w, h)]


_BIT_SHIFTS = np.array([[0, 1, 2, 3], [4, 5, 6, 7]], dtype=np.uint8)


def _plane_from_symbols(symbols: np.ndarray, width: int, height: int) -> np.ndarray:
    grid = np.empty((height // 2) * (width // 4), dtype=np.uint8)
    grid[_area_order(width, height)] = symbols
    grid = grid.reshape(height // 2, width // 4)
    bits = (grid[:, None, :, None] >> _BIT_SHIFTS[None, :, None, :]) & 1
    return bits.reshape(height, width)


def plane_slot_order(kind: str, depth: int) -> list[tuple[int, int]]:
    """Serialization order of (subband index, plane) slots: plane major."""
    nsub = 1 if kind == KIND_LL else 3
    return [(s, b) for b in range(depth) for s in range(nsub)]


def serialize_block(block: CoefficientBlock) -> SymbolStream:
    """Emit every plane of every subband as area symbols in stream order.

    High-pass triples are multiplexed plane major: for each plane index the
    LH, HL then HH segments follow each other, keeping bits of equal
    significance adjacent.
    """
    cubes = to_smr_planes(block)
    per_plane = areas_per_plane(block.width, block.height)
    slots = plane_slot_order(block.kind, block.depth)
    symbols = np.empty(len(slots) * per_plane, dtype=np.uint8)
    for idx, (s, b) in enumerate(slots):
        symbols[idx * per_plane:(idx + 1) * per_plane] = _plane_symbols(
            cubes[s].planes[b]
        )
    boundaries = np.arange(len(slots), dtype=np.int64) * per_plane
    return SymbolStream(symbols=symbols, plane_boundaries=boundaries)


def deserialize_block(
    symbols: np.ndarray | SymbolStream,
    width: int,
    height: int,
    kind: str,
    depth: int,
) -> CoefficientBlock:
    """Exact inverse of serialize_block."""
    if isinstance(symbols, SymbolStream):
        symbols = symbols.symbols
    symbols = np.asarray(symbols, dtype=np.uint8)
    per_plane = areas_per_plane(width, height)
    slots = plane_slot_order(kind, depth)
    if symbols.size != len(slots) * per_plane:
        raise ShapeError(
            f"stream length {symbols.size} != {len(slots)} planes x {per_plane} areas"
        )
    nsub = 1 if kind == KIND_LL else 3
    planes = np.zeros((nsub, depth, height, width), dtype=np.uint8)
    for idx, (s, b) in enumerate(slots):
        seg = symbols[idx * per_plane:(idx + 1) * per_plane]
        planes[s, b] = _plane_from_symbols(seg, width, height)
    cubes = tuple(BitplaneCube(planes[s]) for s in range(nsub))
    return from_smr_planes(cubes, kind)
