"""Desk-scale benchmark harness: sizes and single-thread throughput.

Encodes and losslessly decodes every PGM/PPM in a corpus directory,
timing both directions, and compares the encoded size against a
pre-generated PNG baseline sitting next to each input (same stem,
.png suffix).  Baselines are consumed, never produced, so the codec
itself stays free of third-party image dependencies.
"""

from __future__ import annotations

import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .container import decode_image, encode_image
from .errors import DomainError
from .pnm import read_pnm_file


@dataclass
class BenchRow:
    name: str
    pixels: int
    raw_bytes: int
    encoded_bytes: int
    png_bytes: int | None
    encode_seconds: float
    decode_seconds: float

    @property
    def encode_mps(self) -> float:
        return self.pixels / self.encode_seconds / 1e6

    @property
    def decode_mps(self) -> float:
        return self.pixels / self.decode_seconds / 1e6

    @property
    def ratio_vs_png(self) -> float | None:
        if self.png_bytes is None:
            return None
        return self.encoded_bytes / self.png_bytes

    def as_dict(self) -> dict:
        d = asdict(self)
        d["encode_mps"] = self.encode_mps
        d["decode_mps"] = self.decode_mps
        d["ratio_vs_png"] = self.ratio_vs_png
        return d


@dataclass
class BenchReport:
    threads: int
    rows: list[BenchRow] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def total_pixels(self) -> int:
        return sum(r.pixels for r in self.rows)

    @property
    def aggregate(self) -> dict:
        enc_t = sum(r.encode_seconds for r in self.rows)
        dec_t = sum(r.decode_seconds for r in self.rows)
        withpng = [r for r in self.rows if r.png_bytes is not None]
        agg = {
            "images": len(self.rows),
            "total_pixels": self.total_pixels,
            "encode_mps": self.total_pixels / enc_t / 1e6 if enc_t else 0.0,
            "decode_mps": self.total_pixels / dec_t / 1e6 if dec_t else 0.0,
            "encoded_bytes": sum(r.encoded_bytes for r in self.rows),
            "raw_bytes": sum(r.raw_bytes for r in self.rows),
        }
        if withpng:
            agg["ratio_vs_png"] = sum(r.encoded_bytes for r in withpng) / sum(
                r.png_bytes for r in withpng
            )
        return agg

    def as_dict(self) -> dict:
        return {
            "threads": self.threads,
            "rows": [r.as_dict() for r in self.rows],
            "aggregate": self.aggregate,
            "warnings": self.warnings,
        }

    def to_text(self) -> str:
        lines = [
            f"{'image':<24}{'MP':>8}{'enc MP/s':>10}{'dec MP/s':>10}"
            f"{'bytes':>12}{'vs PNG':>8}"
        ]
        for r in self.rows:
            ratio = f"{r.ratio_vs_png:.3f}" if r.ratio_vs_png is not None else "-"
            lines.append(
                f"{r.name:<24}{r.pixels / 1e6:>8.2f}{r.encode_mps:>10.2f}"
                f"{r.decode_mps:>10.2f}{r.encoded_bytes:>12}{ratio:>8}"
            )
        agg = self.aggregate
        ratio = f"{agg['ratio_vs_png']:.3f}" if "ratio_vs_png" in agg else "-"
        lines.append(
            f"{'TOTAL':<24}{agg['total_pixels'] / 1e6:>8.2f}"
            f"{agg['encode_mps']:>10.2f}{agg['decode_mps']:>10.2f}"
            f"{agg['encoded_bytes']:>12}{ratio:>8}"
        )
        lines.extend(f"warning: {w}" for w in self.warnings)
        return "\n".join(lines)


def run_bench(corpus_dir: str | Path, threads: int = 1) -> BenchReport:
    """Benchmark every PGM/PPM under `corpus_dir` (sorted, not recursive)."""
    corpus = Path(corpus_dir)
    inputs = sorted(
        p for p in corpus.iterdir() if p.suffix.lower() in (".pgm", ".ppm")
    )
    if not inputs:
        raise DomainError(f"no PGM/PPM inputs in {corpus}")
    report = BenchReport(threads=threads)
    for path in inputs:
        image = read_pnm_file(path)
        t0 = time.perf_counter()
        encoded = encode_image(
            image, use_rct=image.channels == 3, threads=threads
        )
        t1 = time.perf_counter()
        decoded = decode_image(encoded)
        t2 = time.perf_counter()
        if not np.array_equal(decoded.samples, image.samples):
            raise AssertionError(f"lossless round trip failed for {path.name}")
        baseline = path.with_suffix(".png")
        png_bytes = baseline.stat().st_size if baseline.exists() else None
        if png_bytes is None:
            report.warnings.append(f"{path.name}: no PNG baseline, ratio omitted")
        bytes_per_sample = (image.bit_depth + 7) // 8
        report.rows.append(
            BenchRow(
                name=path.name,
                pixels=image.width * image.height,
                raw_bytes=image.width * image.height * image.channels
                * bytes_per_sample,
                encoded_bytes=len(encoded),
                png_bytes=png_bytes,
                encode_seconds=t1 - t0,
                decode_seconds=t2 - t1,
            )
        )
    return report
