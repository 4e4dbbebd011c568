"""Wavelet bitplane codec: lossless, progressively decodable image compression.

The pipeline is a reversible color transform, a recursive 5/3 integer
lifting wavelet, signed-magnitude bitplane serialization into 4x2 area
symbols, and zero-run + Huffman entropy coding, stored in a tiled,
random-access container that supports decoding by region, resolution
level and quality.
"""

from .bitplanes import (
    KIND_HP3,
    KIND_LL,
    AreaCoordinate,
    BitplaneCube,
    CoefficientBlock,
    area_coordinate,
    area_to_symbol,
    deserialize_block,
    from_smr_planes,
    serialize_block,
    symbol_to_area,
    to_smr_planes,
)
from .blocks import decode_block, encode_block, plane_offsets, truncate_block
from .container import (
    ContainerHeader,
    ContainerReader,
    container_info,
    decode_image,
    decode_region,
    encode_image,
    truncate_stream,
)
from .entropy import (
    HuffmanCode,
    SymbolStream,
    build_huffman,
    decode_stream,
    encode_stream,
    find_zero_runs,
    optimize_counter_width,
    parse_tree,
    select_zr_symbol,
    serialize_tree,
)
from .pnm import read_pnm, read_pnm_file, write_pnm, write_pnm_file
from .transforms import (
    RasterImage,
    SubbandPyramid,
    default_levels,
    dwt2d_forward,
    dwt2d_inverse,
    lift53_forward,
    lift53_inverse,
    rct_forward,
    rct_inverse,
)

__version__ = "0.1.0"
