"""Command line front end: encode | decode | info | bench | serve.

The CLI is a thin dispatcher over the library; all real work lives in
the container, bench and service modules.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import run_bench
from .container import (
    container_info,
    decode_image,
    decode_region,
    encode_image,
    truncate_stream,
)
from .errors import CodecError
from .pnm import read_pnm_file, write_pnm_file


def _cmd_encode(args: argparse.Namespace) -> int:
    image = read_pnm_file(args.input)
    if args.rct == "auto":
        use_rct = image.channels == 3
    else:
        use_rct = args.rct == "on"
    data = encode_image(image, levels=args.levels, use_rct=use_rct,
                        threads=args.threads)
    if args.quality:
        data = truncate_stream(data, args.quality)
    Path(args.output).write_bytes(data)
    return 0


def _parse_region(text: str) -> tuple[int, int, int, int]:
    parts = text.split(",")
    if len(parts) != 4:
        raise CodecError("region must be x,y,w,h")
    try:
        x, y, w, h = (int(p) for p in parts)
    except ValueError as exc:
        raise CodecError(f"bad region {text!r}") from exc
    return x, y, w, h


def _cmd_decode(args: argparse.Namespace) -> int:
    data = Path(args.input).read_bytes()
    if args.region:
        x, y, w, h = _parse_region(args.region)
        image = decode_region(
            data, x, y, w, h, level=args.level, planes_dropped=args.quality
        )
    else:
        image = decode_image(data, level=args.level, planes_dropped=args.quality)
    # reduced level/quality output can overshoot the nominal range
    clamp = args.level > 0 or args.quality > 0
    write_pnm_file(image, args.output, clamp=clamp)
    return 0


def _cmd_info(args: argparse.Namespace) -> int:
    info = container_info(Path(args.input).read_bytes())
    if args.json:
        print(json.dumps(info, indent=2))
        return 0
    print(f"{info['width']}x{info['height']}  channels={info['channels']}  "
          f"bit_depth={info['bit_depth']}  color={info['color_transform']}  "
          f"levels={info['levels']}  block_dim={info['block_dim']}")
    for grid in info["level_grids"]:
        print(f"  level {grid['level']}: {grid['width']}x{grid['height']} "
              f"grid {grid['grid'][0]}x{grid['grid'][1]}")
    print(f"  blocks: {info['block_count']}  depth histogram: "
          f"{info['depth_histogram']}")
    print(f"  file {info['file_bytes']} bytes = headers ~{info['header_bytes']} "
          f"+ payload ~{info['payload_bytes']}")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    report = run_bench(args.corpus, threads=args.threads)
    if args.json:
        print(json.dumps(report.as_dict(), indent=2))
    else:
        print(report.to_text())
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.containers)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wbpc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="PGM/PPM -> container")
    enc.add_argument("input")
    enc.add_argument("output")
    enc.add_argument("--levels", type=int, default=None,
                     help="decomposition levels (default: auto)")
    enc.add_argument("--rct", choices=["auto", "on", "off"], default="auto",
                     help="reversible color transform")
    enc.add_argument("--quality", type=int, default=0, metavar="N",
                     help="drop N least significant planes after encoding")
    enc.add_argument("--threads", type=int, default=1)
    enc.set_defaults(func=_cmd_encode)

    dec = sub.add_parser("decode", help="container -> PGM/PPM")
    dec.add_argument("input")
    dec.add_argument("output")
    dec.add_argument("--level", type=int, default=0,
                     help="resolution level, 0 = full")
    dec.add_argument("--quality", type=int, default=0, metavar="N",
                     help="drop N least significant planes")
    dec.add_argument("--region", default=None, metavar="X,Y,W,H",
                     help="decode a sub-rectangle in level pixel space")
    dec.set_defaults(func=_cmd_decode)

    info = sub.add_parser("info", help="inspect a container")
    info.add_argument("input")
    info.add_argument("--json", action="store_true")
    info.set_defaults(func=_cmd_info)

    bench = sub.add_parser("bench", help="size/throughput report over a corpus")
    bench.add_argument("corpus")
    bench.add_argument("--threads", type=int, default=1,
                       help="1 = strict single-thread mode")
    bench.add_argument("--json", action="store_true")
    bench.set_defaults(func=_cmd_bench)

    serve = sub.add_parser("serve", help="HTTP tile service")
    serve.add_argument("containers", nargs="+")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CodecError, OSError) as exc:
        print(f"wbpc: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
