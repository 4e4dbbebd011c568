"""HTTP tile service: read-only, stateless per request.

Endpoints (the first loaded container is the default image; every image
is also reachable under /img/{name}/...):

    GET /healthz                          liveness probe
    GET /meta                             header fields as JSON
    GET /tile/{level}/{x}/{y}             rendered tile
        ?planes_dropped=n  quality knob, clamped per block
        &size=s            tile edge in level pixels (default 256)

Tiles are decoded server side and rendered to binary PPM/PGM by default
or PNG when the Accept header asks for image/png.  Samples wider than
8 bits are scaled linearly for display; the scale is reported in the
X-Sample-Scale header.  Responses carry a strong content-hash ETag.
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Sequence

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .container import ContainerReader, decode_region
from .errors import CodecError
from .png import encode_png
from .transforms import level_dims

DEFAULT_TILE_SIZE = 256
MAX_TILE_SIZE = 2048


class MetaResponse(BaseModel):
    width: int
    height: int
    channels: int
    bit_depth: int
    levels: int
    block_dim: int


class HealthResponse(BaseModel):
    status: str


def _render_tile(
    reader: ContainerReader,
    level: int,
    x: int,
    y: int,
    planes_dropped: int,
    size: int,
    accept: str,
) -> Response:
    header = reader.header
    if not 0 <= level <= header.levels:
        return Response(status_code=404, content=b"level out of range")
    lw, lh = level_dims(header.width, header.height, level)
    x0, y0 = x * size, y * size
    if x < 0 or y < 0 or x0 >= lw or y0 >= lh:
        return Response(status_code=404, content=b"tile outside image")
    w = min(size, lw - x0)
    h = min(size, lh - y0)
    region = decode_region(
        reader.data, x0, y0, w, h, level=level, planes_dropped=planes_dropped
    )
    maxval = (1 << header.bit_depth) - 1
    samples = np.clip(region.samples, 0, maxval)
    headers = {}
    if header.bit_depth > 8:
        samples = (samples * 255 + maxval // 2) // maxval
        headers["X-Sample-Scale"] = f"255/{maxval}"
    pixels = np.moveaxis(samples.astype(np.uint8), 0, 2)

    if header.channels == 1:
        gray = pixels[:, :, 0]
        if "image/png" in accept:
            body = encode_png(gray)
            media = "image/png"
        else:
            body = b"P5\n%d %d\n255\n" % (w, h) + gray.tobytes()
            media = "image/x-portable-graymap"
    elif header.channels == 3:
        if "image/png" in accept:
            body = encode_png(pixels)
            media = "image/png"
        else:
            body = b"P6\n%d %d\n255\n" % (w, h) + pixels.tobytes()
            media = "image/x-portable-pixmap"
    else:
        return Response(status_code=400, content=b"no tile rendering for this layout")

    headers["ETag"] = '"' + hashlib.sha256(body).hexdigest() + '"'
    return Response(content=body, media_type=media, headers=headers)


def create_app(
    containers: Sequence[str | Path] | dict[str, bytes],
) -> FastAPI:
    """Build the service around one or more container files.

    `containers` is either paths (image id = file stem) or a name->bytes
    mapping; the first entry answers the unprefixed routes.
    """
    readers: dict[str, ContainerReader] = {}
    if isinstance(containers, dict):
        for name, data in containers.items():
            readers[name] = ContainerReader(data)
    else:
        for p in containers:
            p = Path(p)
            name = p.stem
            if name in readers:
                raise ValueError(f"duplicate image id {name!r}")
            readers[name] = ContainerReader(p.read_bytes())
    if not readers:
        raise ValueError("at least one container is required")
    default_name = next(iter(readers))

    app = FastAPI(title="wbpc tile service")
    app.state.readers = readers

    @app.exception_handler(RequestValidationError)
    async def bad_query(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(CodecError)
    async def codec_error(request: Request, exc: CodecError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    def get_reader(name: str) -> ContainerReader | None:
        return readers.get(name)

    @app.get("/healthz", response_model=HealthResponse)
    async def healthz():
        return HealthResponse(status="ok")

    def meta_of(reader: ContainerReader) -> MetaResponse:
        h = reader.header
        return MetaResponse(
            width=h.width,
            height=h.height,
            channels=h.channels,
            bit_depth=h.bit_depth,
            levels=h.levels,
            block_dim=h.block_dim,
        )

    @app.get("/meta", response_model=MetaResponse)
    async def meta():
        return meta_of(readers[default_name])

    @app.get("/img/{name}/meta", response_model=MetaResponse)
    async def meta_named(name: str):
        reader = get_reader(name)
        if reader is None:
            return Response(status_code=404)
        return meta_of(reader)

    def tile_response(
        reader: ContainerReader,
        level: int,
        x: int,
        y: int,
        planes_dropped: int,
        size: int,
        request: Request,
    ) -> Response:
        if planes_dropped < 0:
            return Response(status_code=400, content=b"planes_dropped must be >= 0")
        if not 1 <= size <= MAX_TILE_SIZE:
            return Response(status_code=400, content=b"size out of range")
        resp = _render_tile(
            reader, level, x, y, planes_dropped, size,
            request.headers.get("accept", ""),
        )
        etag = resp.headers.get("etag")
        if etag and request.headers.get("if-none-match") == etag:
            return Response(status_code=304, headers={"ETag": etag})
        return resp

    @app.get("/tile/{level}/{x}/{y}")
    async def tile(
        level: int,
        x: int,
        y: int,
        request: Request,
        planes_dropped: int = 0,
        size: int = DEFAULT_TILE_SIZE,
    ):
        return tile_response(
            readers[default_name], level, x, y, planes_dropped, size, request
        )

    @app.get("/img/{name}/tile/{level}/{x}/{y}")
    async def tile_named(
        name: str,
        level: int,
        x: int,
        y: int,
        request: Request,
        planes_dropped: int = 0,
        size: int = DEFAULT_TILE_SIZE,
    ):
        reader = get_reader(name)
        if reader is None:
            return Response(status_code=404)
        return tile_response(reader, level, x, y, planes_dropped, size, request)

    return app
