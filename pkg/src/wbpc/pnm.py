"""PGM (P5) and PPM (P6) reading and writing.

Maxvals up to 65535 are supported; samples wider than 8 bits are two
bytes, big endian, per the netpbm convention.  The sample bit depth is
the bit length of maxval, and writing uses the canonical maxval
2^bit_depth - 1.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .transforms import RasterImage


def _parse_header_tokens(data: bytes, count: int) -> tuple[list[int], int]:
    """Read `count` whitespace-separated integers, skipping # comments."""
    tokens: list[int] = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i < n and data[i:i + 1] == b"#":
            while i < n and data[i] not in (0x0A, 0x0D):
                i += 1
            continue
        start = i
        while i < n and not data[i:i + 1].isspace():
            i += 1
        if start == i:
            raise DomainError("truncated header")
        try:
            tokens.append(int(data[start:i]))
        except ValueError as exc:
            raise DomainError(f"bad header token {data[start:i]!r}") from exc
    if i >= n or not data[i:i + 1].isspace():
        raise DomainError("missing whitespace after header")
    return tokens, i + 1


def read_pnm(data: bytes) -> RasterImage:
    """Parse PGM/PPM bytes into a raster image."""
    if data[:2] == b"P5":
        channels = 1
    elif data[:2] == b"P6":
        channels = 3
    else:
        raise DomainError(f"unsupported format magic {data[:2]!r}")
    (width, height, maxval), offset = _parse_header_tokens(data[2:], 3)
    offset += 2
    if width < 1 or height < 1:
        raise DomainError("image dimensions must be >= 1")
    if not 1 <= maxval <= 65535:
        raise DomainError(f"maxval {maxval} out of range")
    count = width * height * channels
    if maxval > 255:
        raw = np.frombuffer(data, dtype=">u2", count=count, offset=offset)
    else:
        raw = np.frombuffer(data, dtype=np.uint8, count=count, offset=offset)
    if raw.size < count:
        raise DomainError("raster shorter than header promises")
    if int(raw.max(initial=0)) > maxval:
        raise DomainError("sample exceeds maxval")
    samples = raw.astype(np.int64).reshape(height, width, channels)
    samples = np.moveaxis(samples, 2, 0)
    return RasterImage(
        width=width,
        height=height,
        channels=channels,
        bit_depth=maxval.bit_length(),
        samples=samples.copy(),
    )


def read_pnm_file(path) -> RasterImage:
    with open(path, "rb") as fh:
        return read_pnm(fh.read())


def write_pnm(image: RasterImage, clamp: bool = False) -> bytes:
    """Serialize to canonical PGM/PPM bytes (maxval 2^bit_depth - 1).

    clamp=True clips out-of-range samples instead of raising; decoders
    use it for reduced-level and reduced-quality output.
    """
    if image.channels == 1:
        magic = b"P5"
    elif image.channels == 3:
        magic = b"P6"
    else:
        raise DomainError(f"{image.channels}-channel images have no PNM form")
    maxval = (1 << image.bit_depth) - 1
    samples = image.samples
    if clamp:
        samples = np.clip(samples, 0, maxval)
    elif samples.size and (samples.min() < 0 or samples.max() > maxval):
        raise DomainError("samples out of range; pass clamp=True to clip")
    interleaved = np.moveaxis(samples, 0, 2)
    if maxval > 255:
        raster = interleaved.astype(">u2").tobytes()
    else:
        raster = interleaved.astype(np.uint8).tobytes()
    header = b"%s\n%d %d\n%d\n" % (magic, image.width, image.height, maxval)
    return header + raster


def write_pnm_file(image: RasterImage, path, clamp: bool = False) -> None:
    with open(path, "wb") as fh:
        fh.write(write_pnm(image, clamp=clamp))
