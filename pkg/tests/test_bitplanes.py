"""Signed-magnitude planes, area mapping and symbol packing."""

import numpy as np
import pytest

from wbpc.bitplanes import (
    KIND_HP3,
    KIND_LL,
    AreaCoordinate,
    CoefficientBlock,
    area_coordinate,
    area_to_symbol,
    areas_per_plane,
    deserialize_block,
    from_smr_planes,
    serialize_block,
    symbol_to_area,
    to_smr_planes,
)
from wbpc.errors import DepthOverflowError, ShapeError, StreamIndexError


def single_coeff_block(value, depth, w=8, h=8):
    g = np.zeros((h, w), dtype=np.int64)
    g[0, 0] = value
    return CoefficientBlock(width=w, height=h, kind=KIND_LL, depth=depth, coeffs=(g,))


class TestSMR:
    def test_plus_five_depth_four(self):
        cube = to_smr_planes(single_coeff_block(5, 4))[0]
        assert cube.planes[:, 0, 0].tolist() == [0, 1, 0, 1]

    def test_minus_one_depth_two(self):
        cube = to_smr_planes(single_coeff_block(-1, 2))[0]
        assert cube.planes[:, 0, 0].tolist() == [1, 1]

    def test_zero_all_planes_clear(self):
        cube = to_smr_planes(single_coeff_block(0, 5))[0]
        assert not cube.planes.any()

    def test_depth_overflow(self):
        with pytest.raises(DepthOverflowError):
            to_smr_planes(single_coeff_block(8, 4))  # |8| needs 4 magnitude bits

    def test_round_trip_random(self, rng):
        for kind in (KIND_LL, KIND_HP3):
            n = 1 if kind == KIND_LL else 3
            grids = [rng.integers(-5000, 5000, (6, 12)) for _ in range(n)]
            block = CoefficientBlock.build(kind, grids)
            back = from_smr_planes(to_smr_planes(block), kind)
            assert back.depth == block.depth
            for a, b in zip(block.coeffs, back.coeffs):
                assert np.array_equal(a, b)

    def test_minimal_depth_choice(self):
        assert CoefficientBlock.build(KIND_LL, [np.zeros((2, 4))]).depth == 1
        g = np.zeros((2, 4))
        g[0, 0] = -7
        assert CoefficientBlock.build(KIND_LL, [g]).depth == 4


class TestAreaCoordinate:
    @pytest.mark.parametrize(
        "k,expect",
        [
            (0, (0, 0, 0)),
            (1, (2, 0, 0)),
            (2, (0, 4, 0)),
            (3, (2, 4, 0)),
            (4, (4, 0, 0)),
            (8, (0, 0, 1)),
        ],
    )
    def test_known_positions_8x8(self, k, expect):
        c = area_coordinate(k, 8, 8, 2)
        assert (c.row, c.col, c.plane) == expect

    def test_out_of_range(self):
        with pytest.raises(StreamIndexError):
            area_coordinate(16, 8, 8, 1)
        with pytest.raises(StreamIndexError):
            area_coordinate(-1, 8, 8, 1)

    @pytest.mark.parametrize("w", [4, 8, 12, 16])
    @pytest.mark.parametrize("h", [2, 4, 6, 8, 10])
    @pytest.mark.parametrize("d", [1, 3])
    def test_bijective_including_partial_bands(self, w, h, d):
        seen = set()
        for k in range(d * w * h // 8):
            c = area_coordinate(k, w, h, d)
            assert c.row % 2 == 0 and c.row + 1 < h
            assert c.col % 4 == 0 and c.col + 3 < w
            assert 0 <= c.plane < d
            seen.add((c.row, c.col, c.plane))
        assert len(seen) == d * w * h // 8


class TestAreaSymbols:
    def cube(self, w=8, h=8, d=1):
        return to_smr_planes(
            CoefficientBlock(width=w, height=h, kind=KIND_LL, depth=d,
                             coeffs=(np.zeros((h, w), dtype=np.int64),))
        )[0]

    def test_empty_and_full(self):
        cube = self.cube()
        coord = AreaCoordinate(row=2, col=4, plane=0)
        assert area_to_symbol(cube, coord) == 0
        cube.planes[0, 2:4, 4:8] = 1
        assert area_to_symbol(cube, coord) == 255

    def test_printed_weights(self):
        # every single-bit pattern matches 2^((n-j) + 4(m-i))
        cube = self.cube()
        coord = AreaCoordinate(row=2, col=4, plane=0)
        for m in range(2):
            for n in range(4):
                cube.planes[:] = 0
                cube.planes[0, 2 + m, 4 + n] = 1
                assert area_to_symbol(cube, coord) == 1 << (n + 4 * m)

    def test_scatter_inverse(self, rng):
        cube = self.cube()
        coord = AreaCoordinate(row=4, col=0, plane=0)
        for s in [0, 255, 18, *rng.integers(0, 256, 20).tolist()]:
            symbol_to_area(int(s), cube, coord)
            assert area_to_symbol(cube, coord) == s
        symbol_to_area(18, cube, coord)
        assert cube.planes[0, 4, 1] == 1 and cube.planes[0, 5, 0] == 1
        assert cube.planes[0, 4:6, 0:4].sum() == 2


class TestSerializeBlock:
    def test_all_zero_block(self):
        block = CoefficientBlock(width=8, height=8, kind=KIND_LL, depth=3,
                                 coeffs=(np.zeros((8, 8), dtype=np.int64),))
        stream = serialize_block(block)
        assert stream.symbols.size == 24
        assert not stream.symbols.any()
        assert stream.plane_boundaries.tolist() == [0, 8, 16]

    def test_single_negative_coefficient(self):
        stream = serialize_block(single_coeff_block(-1, 2))
        expect = np.zeros(16, dtype=np.uint8)
        expect[0] = 1   # sign plane area at origin
        expect[8] = 1   # magnitude LSB plane
        assert np.array_equal(stream.symbols, expect)

    def test_hp3_multiplex_order(self, rng):
        lh = np.zeros((8, 8), dtype=np.int64)
        hl = rng.integers(-3, 4, (8, 8))
        hh = np.zeros((8, 8), dtype=np.int64)
        block = CoefficientBlock.build(KIND_HP3, [lh, hl, hh])
        stream = serialize_block(block)
        per = areas_per_plane(8, 8)
        assert stream.plane_boundaries.size == 3 * block.depth
        for b in range(block.depth):
            base = 3 * b * per
            lh_seg = stream.symbols[base:base + per]
            hh_seg = stream.symbols[base + 2 * per:base + 3 * per]
            assert not lh_seg.any()
            assert not hh_seg.any()
        back = deserialize_block(stream, 8, 8, KIND_HP3, block.depth)
        assert np.array_equal(back.coeffs[1], hl)

    @pytest.mark.parametrize("kind", [KIND_LL, KIND_HP3])
    @pytest.mark.parametrize("w,h", [(4, 2), (8, 8), (12, 6), (128, 128)])
    def test_round_trip(self, rng, kind, w, h):
        n = 1 if kind == KIND_LL else 3
        grids = [rng.integers(-999, 1000, (h, w)) for _ in range(n)]
        block = CoefficientBlock.build(kind, grids)
        back = deserialize_block(serialize_block(block), w, h, kind, block.depth)
        for a, b in zip(block.coeffs, back.coeffs):
            assert np.array_equal(a, b)

    def test_zero_block_serializes_to_zero_stream(self):
        block = CoefficientBlock.build(KIND_HP3,
                                       [np.zeros((6, 8))] * 3, depth=4)
        assert not serialize_block(block).symbols.any()

    def test_symbol_locality(self, rng):
        grids = [rng.integers(-99, 100, (16, 16))]
        block = CoefficientBlock.build(KIND_LL, grids)
        base = serialize_block(block).symbols.copy()
        g2 = grids[0].copy()
        v = int(g2[5, 7])  # flip the magnitude LSB, keeping the sign bit
        g2[5, 7] = (abs(v) ^ 1) * (-1 if v < 0 else 1)
        block2 = CoefficientBlock(width=16, height=16, kind=KIND_LL,
                                  depth=block.depth, coeffs=(g2,))
        changed = np.flatnonzero(serialize_block(block2).symbols != base)
        assert changed.size == 1

    def test_bad_dims_rejected(self):
        with pytest.raises(ShapeError):
            CoefficientBlock(width=6, height=4, kind=KIND_LL, depth=2,
                             coeffs=(np.zeros((4, 6)),))
        with pytest.raises(ShapeError):
            deserialize_block(np.zeros(5, dtype=np.uint8), 8, 8, KIND_LL, 1)
