"""Fast-Hessian interest point detection.

The response pyramid uses the usual ladder of filter sizes: octave o starts
at base + 6*(2**o - 1) and grows by 6*2**o per layer, so the defaults give
9-15-21-27, 15-27-39-51, 27-51-75-99 and 51-99-147-195.  Octave o is
sampled every pixel_skip * 2**o pixels.  A filter of side L corresponds to
a feature scale of 1.2 * L / 9.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DegenerateFitError, InvalidInputError
from .integral import BorderPolicy, IntegralImage, build_integral, hessian_map, laplacian_sign


class PointInterpolation(str, enum.Enum):
    QUADRATIC_3D = "quadratic3d"
    INDEPENDENT_1D = "independent1d"


@dataclass(frozen=True)
class DetectorConfig:
    """Fast-Hessian settings.

    With ``max_features`` set, only the strongest responses are kept after
    thresholding; the threshold alone is used otherwise.
    """

    octaves: int = 4
    scales_per_octave: int = 4
    base_filter_size: int = 9
    pixel_skip: int = 1
    nonmax_radius: int = 1
    response_threshold: float = 0.0
    max_features: int | None = None
    border: BorderPolicy = BorderPolicy.ZERO_RESPONSE
    interpolation: PointInterpolation = PointInterpolation.INDEPENDENT_1D
    hessian_weight: float = 0.9

    def __post_init__(self):
        object.__setattr__(self, "border", BorderPolicy(self.border))
        object.__setattr__(self, "interpolation", PointInterpolation(self.interpolation))
        if self.octaves < 1:
            raise InvalidInputError("octaves must be >= 1")
        if self.scales_per_octave < 3:
            raise InvalidInputError("scales_per_octave must be >= 3")
        if self.pixel_skip < 1:
            raise InvalidInputError("pixel_skip must be >= 1")
        if self.nonmax_radius < 1:
            raise InvalidInputError("nonmax_radius must be >= 1")
        if self.base_filter_size < 9 or self.base_filter_size % 6 != 3:
            raise InvalidInputError("base_filter_size must be >= 9 and 3 mod 6")
        if self.max_features is not None and self.max_features < 0:
            raise InvalidInputError("max_features must be non-negative")

    def filter_size(self, octave: int, layer: float) -> float:
        """Filter side at a (possibly fractional) layer index."""
        return self.base_filter_size + 6 * (2**octave - 1) + 6 * 2**octave * layer

    def step(self, octave: int) -> int:
        return self.pixel_skip * 2**octave


@dataclass(frozen=True)
class InterestPoint:
    x: float
    y: float
    scale: float
    sign: int = 0
    response: float = 0.0


class Extremum(NamedTuple):
    octave: int
    layer: int
    row: int
    col: int
    response: float


@dataclass
class OctaveResponses:
    octave: int
    step: int
    filter_sizes: tuple
    responses: np.ndarray  # (layers, rows, cols)


@dataclass
class ResponsePyramid:
    width: int
    height: int
    config: DetectorConfig
    octaves: list = field(default_factory=list)

    @property
    def maps(self) -> list:
        return [layer for o in self.octaves for layer in o.responses]


def build_response_pyramid(ii: IntegralImage, cfg: DetectorConfig, *, naive: bool = False) -> ResponsePyramid:
    if ii.width < cfg.base_filter_size or ii.height < cfg.base_filter_size:
        raise InvalidInputError(
            f"{ii.width}x{ii.height} image is smaller than the {cfg.base_filter_size}px base filter"
        )
    pyr = ResponsePyramid(ii.width, ii.height, cfg)
    for o in range(cfg.octaves):
        step = cfg.step(o)
        sizes = tuple(int(cfg.filter_size(o, i)) for i in range(cfg.scales_per_octave))
        stack = np.stack(
            [hessian_map(ii, size, step, cfg.hessian_weight, cfg.border, naive=naive) for size in sizes]
        )
        pyr.octaves.append(OctaveResponses(o, step, sizes, stack))
    return pyr


def nonmax_suppress(pyramid: ResponsePyramid, cfg: DetectorConfig | None = None) -> list:
    """Strict 3D maxima above the threshold, excluding the outer layers."""
    cfg = cfg or pyramid.config
    r = cfg.nonmax_radius
    found = []
    for octv in pyramid.octaves:
        R = octv.responses
        n, rows, cols = R.shape
        if rows <= 2 * r or cols <= 2 * r:
            continue
        center = R[1 : n - 1, r : rows - r, r : cols - r]
        nmax = np.full(center.shape, -np.inf)
        for dl in (-1, 0, 1):
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    if dl == dy == dx == 0:
                        continue
                    nmax = np.maximum(
                        nmax, R[1 + dl : n - 1 + dl, r + dy : rows - r + dy, r + dx : cols - r + dx]
                    )
        mask = (center > nmax) & (center > cfg.response_threshold)
        for layer, row, col in zip(*np.nonzero(mask)):
            layer, row, col = int(layer) + 1, int(row) + r, int(col) + r
            found.append(Extremum(octv.octave, layer, row, col, float(R[layer, row, col])))
    return found


# -- sub-sample interpolation ----------------------------------------------------


def fit_independent1d(cube) -> np.ndarray:
    """Per-axis parabola peaks (dx, dy, ds) of a 3x3x3 cube indexed [s, y, x]."""
    c = np.asarray(cube, dtype=np.float64)
    out = np.zeros(3)
    axes = ((c[1, 1, 0], c[1, 1, 2]), (c[1, 0, 1], c[1, 2, 1]), (c[0, 1, 1], c[2, 1, 1]))
    for i, (lo, hi) in enumerate(axes):
        denom = lo - 2.0 * c[1, 1, 1] + hi
        if denom != 0.0:
            out[i] = 0.5 * (lo - hi) / denom
    return out


def fit_quadratic3d(cube) -> np.ndarray:
    """Peak (dx, dy, ds) of the 3D quadratic through a 3x3x3 cube indexed [s, y, x].

    Derivatives come from central differences.  Raises DegenerateFitError when
    the fitted quadratic has no maximum (singular or indefinite Hessian).
    """
    c = np.asarray(cube, dtype=np.float64)
    v = c[1, 1, 1]
    g = 0.5 * np.array([c[1, 1, 2] - c[1, 1, 0], c[1, 2, 1] - c[1, 0, 1], c[2, 1, 1] - c[0, 1, 1]])
    hxx = c[1, 1, 2] + c[1, 1, 0] - 2 * v
    hyy = c[1, 2, 1] + c[1, 0, 1] - 2 * v
    hss = c[2, 1, 1] + c[0, 1, 1] - 2 * v
    hxy = 0.25 * (c[1, 2, 2] - c[1, 2, 0] - c[1, 0, 2] + c[1, 0, 0])
    hxs = 0.25 * (c[2, 1, 2] - c[2, 1, 0] - c[0, 1, 2] + c[0, 1, 0])
    hys = 0.25 * (c[2, 2, 1] - c[2, 0, 1] - c[0, 2, 1] + c[0, 0, 1])
    H = np.array([[hxx, hxy, hxs], [hxy, hyy, hys], [hxs, hys, hss]])
    if not np.all(np.isfinite(H)) or np.linalg.eigvalsh(H).max() >= 0:
        raise DegenerateFitError("quadratic fit has no interior maximum")
    return -np.linalg.solve(H, g)


def _cube(pyramid, octave, layer, row, col):
    R = pyramid.octaves[octave].responses
    return R[layer - 1 : layer + 2, row - 1 : row + 2, col - 1 : col + 2]


def _in_range(pyramid, octave, layer, row, col):
    _, rows, cols = pyramid.octaves[octave].responses.shape
    n = pyramid.config.scales_per_octave
    return 1 <= layer <= n - 2 and 1 <= row <= rows - 2 and 1 <= col <= cols - 2


def _point(pyramid, octave, layer, row, col, offsets, response):
    cfg = pyramid.config
    step = cfg.step(octave)
    dx, dy, ds = offsets
    size = cfg.filter_size(octave, layer + ds)
    return InterestPoint(
        x=float((col + dx) * step),
        y=float((row + dy) * step),
        scale=float(1.2 * size / 9.0),
        response=float(response),
    )


def interpolate_point_1d(pyramid: ResponsePyramid, ext: Extremum) -> InterestPoint:
    offsets = fit_independent1d(_cube(pyramid, ext.octave, ext.layer, ext.row, ext.col))
    return _point(pyramid, ext.octave, ext.layer, ext.row, ext.col, offsets, ext.response)


def interpolate_point_quadratic3d(pyramid: ResponsePyramid, ext: Extremum) -> InterestPoint:
    """Newton step on the 3D quadratic, with at most one re-centring move."""
    o, layer, row, col = ext.octave, ext.layer, ext.row, ext.col
    offsets = fit_quadratic3d(_cube(pyramid, o, layer, row, col))
    if np.any(np.abs(offsets) >= 0.5):
        move = np.where(np.abs(offsets) >= 0.5, np.sign(offsets), 0).astype(int)
        col, row, layer = col + move[0], row + move[1], layer + move[2]
        if not _in_range(pyramid, o, layer, row, col):
            raise DegenerateFitError("re-centred peak leaves the sample volume")
        offsets = fit_quadratic3d(_cube(pyramid, o, layer, row, col))
        if np.any(np.abs(offsets) >= 0.5):
            raise DegenerateFitError("peak offset stays >= 0.5 after re-centring")
    return _point(pyramid, o, layer, row, col, offsets, ext.response)


_INTERPOLATORS = {
    PointInterpolation.QUADRATIC_3D: interpolate_point_quadratic3d,
    PointInterpolation.INDEPENDENT_1D: interpolate_point_1d,
}


class Detection(NamedTuple):
    point: InterestPoint
    seed: Extremum


def detect_detailed(image, cfg: DetectorConfig = DetectorConfig(), *, ii: IntegralImage | None = None) -> list:
    """Like `detect`, but keeps the discrete seed of every point."""
    if ii is None:
        ii = build_integral(image)
    pyr = build_response_pyramid(ii, cfg)
    interpolate = _INTERPOLATORS[cfg.interpolation]
    found = []
    for ext in nonmax_suppress(pyr, cfg):
        try:
            found.append(Detection(interpolate(pyr, ext), ext))
        except DegenerateFitError:
            continue
    found.sort(key=lambda d: (-d.point.response, d.point.y, d.point.x, d.point.scale))
    if cfg.max_features is not None:
        found = found[: cfg.max_features]
    # The Laplacian sign is only evaluated for the points that survive.
    out = []
    for point, seed in found:
        step = cfg.step(seed.octave)
        size = int(cfg.filter_size(seed.octave, seed.layer))
        sign = laplacian_sign(ii, seed.col * step, seed.row * step, size, cfg.border)
        out.append(Detection(InterestPoint(point.x, point.y, point.scale, sign, point.response), seed))
    return out


def detect(image, cfg: DetectorConfig = DetectorConfig(), *, ii: IntegralImage | None = None) -> list:
    """Detect interest points, strongest response first."""
    return [d.point for d in detect_detailed(image, cfg, ii=ii)]
