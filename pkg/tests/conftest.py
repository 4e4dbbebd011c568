"""Shared fixtures: seeded images, natural-statistics synthetics, corpora."""

from __future__ import annotations

import numpy as np
import pytest

from wbpc.transforms import RasterImage


def make_image(rng: np.random.Generator, width: int, height: int,
               channels: int, bit_depth: int) -> RasterImage:
    planes = [
        rng.integers(0, 1 << bit_depth, (height, width)) for _ in range(channels)
    ]
    return RasterImage.from_planes(planes, bit_depth)


def smooth_image(rng: np.random.Generator, width: int, height: int,
                 channels: int = 1, bit_depth: int = 8) -> RasterImage:
    """Natural-statistics synthetic: low-pass filtered noise plus gradient."""
    maxval = (1 << bit_depth) - 1
    planes = []
    yy, xx = np.mgrid[0:height, 0:width]
    for c in range(channels):
        noise = rng.normal(0, 1, (height, width))
        k = 9
        kernel = np.ones(k) / k
        for axis in (0, 1):
            noise = np.apply_along_axis(
                lambda m: np.convolve(m, kernel, mode="same"), axis, noise
            )
        plane = (
            0.45 * maxval * (xx + yy) / max(width + height - 2, 1)
            + 0.25 * maxval
            + noise * maxval * 0.25
        )
        planes.append(np.clip(np.round(plane), 0, maxval).astype(np.int64))
    return RasterImage.from_planes(planes, bit_depth)


def gradient_image(width: int, height: int, channels: int = 1,
                   bit_depth: int = 8) -> RasterImage:
    maxval = (1 << bit_depth) - 1
    yy, xx = np.mgrid[0:height, 0:width]
    base = (xx + 2 * yy) * maxval // max(width + 2 * height - 3, 1)
    planes = [np.minimum(base + 7 * c, maxval).astype(np.int64)
              for c in range(channels)]
    return RasterImage.from_planes(planes, bit_depth)


@pytest.fixture(scope="session")
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)


@pytest.fixture(scope="session")
def photo_images() -> list[tuple[str, RasterImage]]:
    """Standard photographic test images from scikit-image's bundled data."""
    skimage_data = pytest.importorskip("skimage.data")
    out: list[tuple[str, RasterImage]] = []
    for name in ("camera", "moon", "coins"):
        arr = getattr(skimage_data, name)().astype(np.int64)
        out.append((name, RasterImage.from_planes([arr], 8)))
    astro = skimage_data.astronaut().astype(np.int64)
    out.append(
        ("astronaut", RasterImage.from_planes(
            [astro[:, :, 0], astro[:, :, 1], astro[:, :, 2]], 8))
    )
    return out
