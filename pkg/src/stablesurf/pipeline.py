"""Detect-and-describe in one call."""

from __future__ import annotations

from dataclasses import dataclass

from .descriptor import describe_batch
from .detector import detect
from .image import as_gray
from .integral import build_integral


@dataclass
class Extraction:
    points: list  # every detected point
    features: list  # (InterestPoint, Descriptor64) that survived description
    dropped: int


def extract(image, variant) -> Extraction:
    """Integral image, detection, orientation and description for one variant."""
    ii = build_integral(as_gray(image))
    points = detect(None, variant.detector, ii=ii)
    res = describe_batch(ii, points, variant)
    return Extraction(points, res.features, res.dropped)
