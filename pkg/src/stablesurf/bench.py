"""Timing harness: median over outer runs of the best of several inner runs."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

from .image import as_gray
from .pipeline import extract


@dataclass(frozen=True)
class TimingResult:
    variant: str
    image: str
    best_of_inner_ms: tuple  # one best-of-inner time per outer run
    median_ms: float
    feature_count: int


def time_call(fn, outer: int = 11, inner: int = 10):
    """Return (per-outer best times in ms, median of them, last result)."""
    bests = []
    result = None
    for _ in range(outer):
        best = float("inf")
        for _ in range(inner):
            t0 = time.perf_counter()
            result = fn()
            best = min(best, time.perf_counter() - t0)
        bests.append(best * 1e3)
    return tuple(bests), statistics.median(bests), result


def bench_variant(image, variant, image_name: str = "", outer: int = 11, inner: int = 10) -> TimingResult:
    """Time detect + describe (integral image included, file I/O excluded)."""
    gray = as_gray(image)
    bests, median, res = time_call(lambda: extract(gray, variant), outer, inner)
    return TimingResult(variant.name, image_name, bests, median, len(res.features))


def bench(image, variants, image_name: str = "", outer: int = 11, inner: int = 10) -> list:
    """Variants run one after another, never interleaved."""
    return [bench_variant(image, v, image_name, outer, inner) for v in variants]
