"""Benchmark harness: corpus persistence, method dispatch and the CSV report."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import baselines, metrics
from .baselines import FilterConfig
from .fileio import read_raster_csv, write_raster_csv
from .lattice import Raster
from .model import HyperParams
from .sampler import HIGMRF, IGMRF, denoise
from .synth import SynthConfig, SynthPair, generate_corpus

__all__ = [
    "UnknownMethodError",
    "MissingExternalError",
    "BenchRow",
    "write_corpus",
    "read_corpus",
    "run_method",
    "run_bench",
    "write_report",
    "aggregate",
]

BASELINE_METHODS = ("ga", "av", "wi", "nlm")
SAMPLER_METHODS = (IGMRF, HIGMRF)

REPORT_COLUMNS = ("image", "method", "rmse", "psnr_db", "kld", "ssim", "wall_ms")


class UnknownMethodError(ValueError):
    pass


class MissingExternalError(FileNotFoundError):
    def __init__(self, method: str, missing: list[str]):
        super().__init__(f"method {method!r}: missing outputs: {', '.join(missing)}")
        self.missing = missing


@dataclass(frozen=True)
class BenchRow:
    image: int
    method: str
    report: metrics.MetricsReport
    wall_ms: float


def write_corpus(out_dir, pairs: list[SynthPair], config_lines: list[str]):
    """truth_k.csv / noisy_k.csv per pair plus manifest.csv."""
    out_dir = Path(out_dir)
    for k, pair in enumerate(pairs):
        write_raster_csv(out_dir / f"truth_{k}.csv", pair.truth, config_lines)
        write_raster_csv(out_dir / f"noisy_{k}.csv", pair.noisy, config_lines)
    lines = [f"# {c}" for c in config_lines]
    lines.append("index,spot_count,centers,amplitudes,target_snr_db,realized_snr_db,seed")
    for k, pair in enumerate(pairs):
        centers = ";".join(f"{s.row:.9g}:{s.col:.9g}" for s in pair.spots)
        amps = ";".join(f"{s.amplitude:.9g}" for s in pair.spots)
        lines.append(
            f"{k},{len(pair.spots)},{centers},{amps},"
            f"{pair.target_snr_db:.9g},{pair.realized_snr_db:.9g},{pair.image_seed}"
        )
    (out_dir / "manifest.csv").write_text("\n".join(lines) + "\n")


def read_corpus(corpus_dir) -> list[tuple[Raster, Raster]]:
    """(truth, noisy) pairs per the manifest in corpus_dir."""
    corpus_dir = Path(corpus_dir)
    manifest = corpus_dir / "manifest.csv"
    if not manifest.exists():
        raise FileNotFoundError(f"no manifest.csv in {corpus_dir}")
    indices = []
    for line in manifest.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("index,"):
            continue
        indices.append(int(line.split(",", 1)[0]))
    pairs = []
    for k in sorted(indices):
        pairs.append((
            read_raster_csv(corpus_dir / f"truth_{k}.csv"),
            read_raster_csv(corpus_dir / f"noisy_{k}.csv"),
        ))
    return pairs


def run_method(method: str, noisy: Raster, hp: HyperParams, fc: FilterConfig,
               image_index: int = 0) -> Raster:
    """Denoise one raster with a named method."""
    if method == "ga":
        return baselines.gaussian_filter(noisy, fc.gaussian_sigma, fc.gaussian_size)
    if method == "av":
        return baselines.average_filter(noisy, fc.average_size)
    if method == "wi":
        return baselines.wiener_filter(noisy, fc.wiener_size)
    if method == "nlm":
        return baselines.nlm_filter(noisy, fc.nlm_patch, fc.nlm_search, fc.nlm_h)
    if method in SAMPLER_METHODS:
        return denoise(noisy, replace(hp), variant=method).posterior_mean
    raise UnknownMethodError(f"unknown method {method!r}")


def run_bench(pairs: list[tuple[Raster, Raster]], methods: list[str],
              hp: HyperParams, fc: FilterConfig) -> list[BenchRow]:
    """Every requested method over every (truth, noisy) pair."""
    external: dict[str, list[Raster]] = {}
    for method in methods:
        if method.startswith("external:"):
            external[method] = _load_external(method, len(pairs))
        elif method not in BASELINE_METHODS and method not in SAMPLER_METHODS:
            raise UnknownMethodError(f"unknown method {method!r}")
    rows = []
    for k, (truth, noisy) in enumerate(pairs):
        for method in methods:
            t0 = time.perf_counter()
            if method in external:
                estimate = external[method][k]
            else:
                estimate = run_method(method, noisy, hp, fc, image_index=k)
            wall_ms = (time.perf_counter() - t0) * 1e3
            rows.append(BenchRow(
                image=k,
                method=method,
                report=metrics.evaluate(estimate, truth),
                wall_ms=wall_ms,
            ))
    return rows


def _load_external(method: str, n_images: int) -> list[Raster]:
    ext_dir = Path(method.split(":", 1)[1])
    paths = [ext_dir / f"denoised_{k}.csv" for k in range(n_images)]
    missing = [str(p) for p in paths if not p.exists()]
    if missing:
        raise MissingExternalError(method, missing)
    return [read_raster_csv(p) for p in paths]


def _fmt(v: float) -> str:
    return format(v, ".9g")


def write_report(path, rows: list[BenchRow], methods: list[str],
                 config_lines: list[str]):
    """Per-image rows, then one mean row per method; standard deviations go
    into structured comment lines so the column contract stays fixed."""
    lines = [f"# {c}" for c in config_lines]
    lines.append(",".join(REPORT_COLUMNS))
    for row in sorted(rows, key=lambda r: (r.image, methods.index(r.method))):
        m = row.report
        lines.append(
            f"{row.image},{row.method},{_fmt(m.rmse)},{_fmt(m.psnr_db)},"
            f"{_fmt(m.kld)},{_fmt(m.ssim)},{_fmt(row.wall_ms)}"
        )
    std_lines = []
    for method in methods:
        sub = [r for r in rows if r.method == method]
        cols = np.array([
            [r.report.rmse, r.report.psnr_db, r.report.kld, r.report.ssim, r.wall_ms]
            for r in sub
        ])
        mean = cols.mean(axis=0)
        std = cols.std(axis=0)
        lines.append("mean," + method + "," + ",".join(_fmt(v) for v in mean))
        std_lines.append("# std," + method + "," + ",".join(_fmt(v) for v in std[:4]))
    lines.extend(std_lines)
    Path(path).write_text("\n".join(lines) + "\n")


def aggregate(rows: list[BenchRow], method: str) -> dict[str, float]:
    """Corpus means of each metric for one method."""
    sub = [r for r in rows if r.method == method]
    if not sub:
        raise ValueError(f"no rows for method {method!r}")
    return {
        "rmse": float(np.mean([r.report.rmse for r in sub])),
        "psnr_db": float(np.mean([r.report.psnr_db for r in sub])),
        "kld": float(np.mean([r.report.kld for r in sub])),
        "ssim": float(np.mean([r.report.ssim for r in sub])),
    }
