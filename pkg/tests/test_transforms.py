"""Color transform and lifting wavelet: frozen examples plus properties.

The 1-D reference below re-implements the lifting equations with scalar
loops and explicit mirroring; the vectorized code must match it on
everything, which anchors the 2-D transform through composition.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wbpc.errors import DomainError, LevelRangeError, ShapeError, UnsupportedLayoutError
from wbpc.transforms import (
    RasterImage,
    default_levels,
    dwt2d_forward,
    dwt2d_inverse,
    level_dims,
    lift53_forward,
    lift53_inverse,
    rct_forward,
    rct_inverse,
)


def ref_lift53(x):
    """Scalar reference: mirror extension, detail then update passes."""
    n = len(x)
    if n == 1:
        return [x[0]], []

    def sample(i):
        if i < 0:
            i = -i
        if i >= n:
            i = 2 * (n - 1) - i
        return x[i]

    high = []
    for k in range(n // 2):
        i = 2 * k + 1
        high.append(x[i] - ((sample(i - 1) + sample(i + 1)) // 2))

    def det(k):
        # boundary detail samples mirror to their nearest neighbor
        return high[min(max(k, 0), len(high) - 1)]

    low = []
    for k in range((n + 1) // 2):
        low.append(x[2 * k] + ((det(k - 1) + det(k) + 2) // 4))
    return low, high


def pixel_image(r, g, b, depth=8):
    return RasterImage.from_planes(
        [np.full((1, 1), v, dtype=np.int64) for v in (r, g, b)], depth
    )


class TestRCT:
    @pytest.mark.parametrize(
        "rgb,ycbcr",
        [
            ((0, 0, 0), (0, 0, 0)),
            ((255, 255, 255), (255, 0, 0)),
            ((100, 50, 25), (56, -25, 50)),
        ],
    )
    def test_known_values(self, rgb, ycbcr):
        y, cb, cr = rct_forward(pixel_image(*rgb))
        assert (int(y[0, 0]), int(cb[0, 0]), int(cr[0, 0])) == ycbcr
        r, g, b = rct_inverse(y, cb, cr)
        assert (int(r[0, 0]), int(g[0, 0]), int(b[0, 0])) == rgb

    def test_channel_count_checked(self):
        gray = RasterImage.from_planes([np.zeros((2, 2), dtype=np.int64)], 8)
        with pytest.raises(UnsupportedLayoutError):
            rct_forward(gray)

    def test_mismatched_planes_rejected(self):
        with pytest.raises(ShapeError):
            rct_inverse(np.zeros((2, 2)), np.zeros((2, 3)), np.zeros((2, 2)))

    def test_round_trip_and_range(self, rng):
        for depth in (8, 9, 12, 16):
            img = RasterImage.from_planes(
                [rng.integers(0, 1 << depth, (17, 13)) for _ in range(3)], depth
            )
            y, cb, cr = rct_forward(img)
            lim = (1 << depth) - 1
            assert 0 <= y.min() and y.max() <= lim
            assert -lim <= cb.min() and cb.max() <= lim
            assert -lim <= cr.min() and cr.max() <= lim
            r, g, b = rct_inverse(y, cb, cr)
            assert np.array_equal(np.stack([r, g, b]), img.samples)


class TestLift53:
    @pytest.mark.parametrize(
        "signal,low,high",
        [
            ([5, 5, 5, 5], [5, 5], [0, 0]),
            ([0, 1, 2, 3], [0, 2], [0, 1]),
            ([7], [7], []),
        ],
    )
    def test_known_values(self, signal, low, high):
        lo, hi = lift53_forward(signal)
        assert lo.tolist() == low
        assert hi.tolist() == high
        assert lift53_inverse(lo, hi).tolist() == signal

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            lift53_forward([])

    def test_bad_band_lengths_rejected(self):
        with pytest.raises(ShapeError):
            lift53_inverse([1, 2], [3, 4, 5])

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(min_value=-(2 ** 20), max_value=2 ** 20), min_size=1,
                    max_size=40))
    def test_matches_reference_and_inverts(self, signal):
        lo, hi = lift53_forward(signal)
        ref_lo, ref_hi = ref_lift53(signal)
        assert lo.tolist() == ref_lo
        assert hi.tolist() == ref_hi
        assert len(lo) == (len(signal) + 1) // 2
        assert len(hi) == len(signal) // 2
        assert lift53_inverse(lo, hi).tolist() == signal

    def test_constant_annihilation(self):
        for n in range(1, 30):
            lo, hi = lift53_forward([42] * n)
            assert not hi.size or not hi.any()
            assert (lo == 42).all()


class TestDWT2D:
    def test_constant_plane(self):
        pyr = dwt2d_forward(np.full((8, 8), 9, dtype=np.int64), 1)
        assert pyr.ll.shape == (4, 4) and (pyr.ll == 9).all()
        for band in pyr.details[0]:
            assert not band.any()

    def test_zero_levels_is_identity(self):
        p = np.arange(12).reshape(3, 4)
        pyr = dwt2d_forward(p, 0)
        assert np.array_equal(pyr.ll, p)
        assert pyr.details == []

    def test_ramp_matches_1d_composition(self):
        p = np.arange(16, dtype=np.int64).reshape(4, 4)
        pyr = dwt2d_forward(p, 1)
        # rows first...
        lows, highs = [], []
        for row in p:
            lo, hi = ref_lift53(list(row))
            lows.append(lo)
            highs.append(hi)
        lx = np.array(lows)
        hx = np.array(highs)
        # ...then columns of each half
        ll = np.array([ref_lift53(list(col))[0] for col in lx.T]).T
        lh = np.array([ref_lift53(list(col))[1] for col in lx.T]).T
        hl = np.array([ref_lift53(list(col))[0] for col in hx.T]).T
        hh = np.array([ref_lift53(list(col))[1] for col in hx.T]).T
        assert np.array_equal(pyr.ll, ll)
        assert np.array_equal(pyr.details[0][0], lh)
        assert np.array_equal(pyr.details[0][1], hl)
        assert np.array_equal(pyr.details[0][2], hh)

    @pytest.mark.parametrize("shape", [(1, 1), (1, 7), (13, 9), (16, 16), (31, 2)])
    @pytest.mark.parametrize("levels", [0, 1, 3, 5])
    def test_round_trip(self, rng, shape, levels):
        p = rng.integers(0, 1 << 16, shape)
        pyr = dwt2d_forward(p, levels)
        lw, lh = level_dims(shape[1], shape[0], levels)
        assert pyr.ll.shape == (lh, lw)
        assert np.array_equal(dwt2d_inverse(pyr), p)

    def test_subband_dims_law(self, rng):
        p = rng.integers(0, 256, (11, 7))
        pyr = dwt2d_forward(p, 1)
        lh, hl, hh = pyr.details[0]
        assert pyr.ll.shape == (6, 4)
        assert lh.shape == (5, 4)
        assert hl.shape == (6, 3)
        assert hh.shape == (5, 3)

    def test_level_range_errors(self):
        with pytest.raises(LevelRangeError):
            dwt2d_forward(np.zeros((4, 4)), -1)
        with pytest.raises(LevelRangeError):
            dwt2d_forward(np.zeros((4, 4)), 31)
        with pytest.raises(DomainError):
            dwt2d_forward(np.zeros((0, 4)), 1)


class TestDefaults:
    def test_large_images_get_five(self):
        assert default_levels(4096, 4096) == 5
        assert default_levels(513, 16) == 5

    def test_small_images_keep_ll_16(self):
        assert default_levels(512, 512) == 5  # 512 -> 16 after 5 halvings
        assert default_levels(256, 256) == 4
        assert default_levels(64, 64) == 2
        assert default_levels(16, 16) == 0
        assert default_levels(1, 1) == 0
