"""Reversible color transform and 5/3 integer lifting wavelet.

Everything here is exact integer arithmetic: inverse(forward(x)) is the
identity bit for bit, for any integer input, any length parity and any
number of decomposition levels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    LevelRangeError,
    ShapeError,
    UnsupportedLayoutError,
)

MAX_LEVELS = 30


@dataclass
class RasterImage:
    """Integer sample grid, channel planar: samples has shape (channels, h, w)."""

    width: int
    height: int
    channels: int
    bit_depth: int
    samples: np.ndarray

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.int64)
        if self.samples.shape != (self.channels, self.height, self.width):
            raise ShapeError(
                f"samples shape {self.samples.shape} != "
                f"({self.channels}, {self.height}, {self.width})"
            )
        if not (1 <= self.channels <= 4):
            raise UnsupportedLayoutError(f"channels must be 1..4, got {self.channels}")
        if not (1 <= self.bit_depth <= 16):
            raise DomainError(f"bit depth must be 1..16, got {self.bit_depth}")
        if self.width < 1 or self.height < 1:
            raise DomainError("image dimensions must be >= 1")

    @classmethod
    def from_planes(cls, planes: list[np.ndarray], bit_depth: int) -> "RasterImage":
        stack = np.stack([np.asarray(p, dtype=np.int64) for p in planes])
        c, h, w = stack.shape
        return cls(width=w, height=h, channels=c, bit_depth=bit_depth, samples=stack)

    def plane(self, channel: int) -> np.ndarray:
        return self.samples[channel]

    def validate_source(self) -> None:
        """Check the encode-input invariant: unsigned samples below 2^bit_depth."""
        if self.samples.size and (
            self.samples.min() < 0 or self.samples.max() >= (1 << self.bit_depth)
        ):
            raise DomainError(f"samples out of range for bit depth {self.bit_depth}")


@dataclass
class SubbandPyramid:
    """Result of a recursive 2-D split: detail triples per level plus final LL.

    details[k] holds (lh, hl, hh) for level k+1; level 1 is the finest.
    Subband naming follows the horizontal-then-vertical convention:
    LH = low-pass horizontally, high-pass vertically.
    """

    levels: int
    ll: np.ndarray
    details: list[tuple[np.ndarray, np.ndarray, np.ndarray]]


def rct_forward(image: RasterImage) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reversible color transform: RGB -> (Y, Cb, Cr), exactly invertible."""
    if image.channels != 3:
        raise UnsupportedLayoutError("color transform needs exactly 3 channels")
    r = image.plane(0)
    g = image.plane(1)
    b = image.plane(2)
    y = (r + 2 * g + b) >> 2
    cb = b - g
    cr = r - g
    return y, cb, cr


def rct_inverse(
    y: np.ndarray, cb: np.ndarray, cr: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact inverse of rct_forward."""
    y = np.asarray(y, dtype=np.int64)
    cb = np.asarray(cb, dtype=np.int64)
    cr = np.asarray(cr, dtype=np.int64)
    if not (y.shape == cb.shape == cr.shape):
        raise ShapeError("Y/Cb/Cr planes must have equal shapes")
    g = y - ((cb + cr) >> 2)
    r = cr + g
    b = cb + g
    return r, g, b


def _split_axis0(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One 5/3 lifting split along axis 0 with symmetric boundary extension.

    high[n] = x[2n+1] - floor((x[2n] + x[2n+2]) / 2)
    low[n]  = x[2n]   + floor((high[n-1] + high[n] + 2) / 4)
    Out-of-range neighbors mirror about the boundary sample.
    """
    n = x.shape[0]
    xe = x[0::2]
    xo = x[1::2]
    if n == 1:
        return xe.copy(), xo.copy()
    m = xo.shape[0]
    if n % 2 == 0:
        # x[2m] mirrors to x[2m-2] = xe[m-1]
        right_even = np.concatenate([xe[1:m], xe[m - 1:m]], axis=0)
    else:
        right_even = xe[1:m + 1]
    high = xo - ((xe[:m] + right_even) >> 1)
    h_left = np.concatenate([high[0:1], high[:-1]], axis=0)
    if n % 2 == 0:
        h_right = high
    else:
        # low has one more entry than high; high[m] mirrors to high[m-1]
        h_left = np.concatenate([h_left, high[m - 1:m]], axis=0)
        h_right = np.concatenate([high, high[m - 1:m]], axis=0)
    low = xe + ((h_left + h_right + 2) >> 2)
    return low, high


def _merge_axis0(low: np.ndarray, high: np.ndarray) -> np.ndarray:
    """Exact inverse of _split_axis0."""
    nl = low.shape[0]
    nh = high.shape[0]
    if nl - nh not in (0, 1) or nl == 0:
        raise ShapeError(f"incompatible band lengths {nl}/{nh}")
    if low.ndim != high.ndim or low.shape[1:] != high.shape[1:]:
        raise ShapeError("low/high trailing shapes differ")
    n = nl + nh
    if nh == 0:
        return low.copy()
    h_left = np.concatenate([high[0:1], high[:nl - 1]], axis=0)
    if nl == nh:
        h_right = high
    else:
        h_right = np.concatenate([high, high[nh - 1:nh]], axis=0)
    xe = low - ((h_left + h_right + 2) >> 2)
    if nl == nh:
        right_even = np.concatenate([xe[1:], xe[nl - 1:nl]], axis=0)
    else:
        right_even = xe[1:]
    xo = high + ((xe[:nh] + right_even) >> 1)
    out = np.empty((n,) + low.shape[1:], dtype=np.int64)
    out[0::2] = xe
    out[1::2] = xo
    return out


def lift53_forward(signal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """1-D forward lifting; returns (low, high) with lengths ceil(n/2), floor(n/2)."""
    x = np.asarray(signal, dtype=np.int64)
    if x.ndim != 1:
        raise ShapeError("signal must be 1-D")
    if x.size == 0:
        raise DomainError("empty signal")
    return _split_axis0(x)


def lift53_inverse(low: np.ndarray, high: np.ndarray) -> np.ndarray:
    """1-D inverse lifting; exact inverse of lift53_forward."""
    low = np.asarray(low, dtype=np.int64)
    high = np.asarray(high, dtype=np.int64)
    if low.ndim != 1 or high.ndim != 1:
        raise ShapeError("bands must be 1-D")
    return _merge_axis0(low, high)


def _split_plane(plane: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    # rows first (horizontal split), then columns of each half
    low_c, high_c = _split_axis0(plane.T)
    lx = low_c.T
    hx = high_c.T
    ll, lh = _split_axis0(lx)
    hl, hh = _split_axis0(hx)
    return ll, lh, hl, hh


def _merge_plane(
    ll: np.ndarray, lh: np.ndarray, hl: np.ndarray, hh: np.ndarray
) -> np.ndarray:
    lx = _merge_axis0(ll, lh)
    hx = _merge_axis0(hl, hh)
    return _merge_axis0(lx.T, hx.T).T


def dwt2d_forward(plane: np.ndarray, levels: int) -> SubbandPyramid:
    """Recursive separable 5/3 split; recursion applies to the LL band only."""
    plane = np.asarray(plane, dtype=np.int64)
    if plane.ndim != 2:
        raise ShapeError("plane must be 2-D")
    if plane.size == 0:
        raise DomainError("empty plane")
    if not 0 <= levels <= MAX_LEVELS:
        raise LevelRangeError(f"levels must be in [0, {MAX_LEVELS}]")
    ll = plane.copy()
    details: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
    for _ in range(levels):
        ll, lh, hl, hh = _split_plane(ll)
        details.append((lh, hl, hh))
    return SubbandPyramid(levels=levels, ll=ll, details=details)


def dwt2d_inverse(pyr: SubbandPyramid) -> np.ndarray:
    """Exact inverse of dwt2d_forward."""
    ll = np.asarray(pyr.ll, dtype=np.int64)
    for lh, hl, hh in reversed(pyr.details):
        ll = _merge_plane(ll, np.asarray(lh), np.asarray(hl), np.asarray(hh))
    return ll


def level_dims(width: int, height: int, level: int) -> tuple[int, int]:
    """Dims of the LL band after `level` splits (iterated ceil halving)."""
    return (
        (width + (1 << level) - 1) >> level,
        (height + (1 << level) - 1) >> level,
    )


def default_levels(width: int, height: int) -> int:
    """Decomposition depth heuristic: 5 for large images, else keep LL >= 16x16."""
    if max(width, height) > 512:
        return 5
    levels = 0
    while levels < MAX_LEVELS:
        w, h = level_dims(width, height, levels + 1)
        if w < 16 or h < 16:
            break
        levels += 1
    return levels
