"""Orientation estimation and SURF-64 description.

All strategies share one scheme.  A set of sample points is laid out in
feature-local coordinates (u, v), measured in units of the feature scale s
with u along the feature's orientation.  The points are rotated into the
image, rounded to pixels (add 0.5, then floor), and differentiated there with
the configured kernel at scale s.  Each gradient is rotated into the feature
frame and accumulated into the 16 subregions with a per-strategy weight
matrix.  Only the sample layout and the weight matrix differ between
strategies.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError, ZeroDescriptorError
from .integral import BorderPolicy, DerivativeKernel, IntegralImage, gradient_samples

WINDOW = math.pi / 3


class OrientationMethod(str, enum.Enum):
    SLIDING_WINDOW = "sliding_window"
    AVERAGE_GRADIENT = "average_gradient"


class DescriptorMethod(str, enum.Enum):
    NEAREST = "nearest"
    OVERLAPPING = "overlapping"
    BILINEAR = "bilinear"


@dataclass(frozen=True)
class OrientationStrategy:
    """Orientation settings; radius and sigma are multiples of the feature scale.

    The sliding window spans pi/3 and its start angle advances from -pi in
    increments of ``window_step`` radians.
    """

    method: OrientationMethod = OrientationMethod.SLIDING_WINDOW
    sample_radius: float = 6.0
    sigma: float = 2.5
    window_step: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "method", OrientationMethod(self.method))
        if not self.sample_radius > 0 or not self.sigma > 0:
            raise InvalidInputError("orientation radius and sigma must be positive")
        if not 0 < self.window_step <= WINDOW:
            raise InvalidInputError("window_step must lie in (0, pi/3]")

    @property
    def window_starts(self) -> np.ndarray:
        return -math.pi + self.window_step * np.arange(math.ceil(2 * math.pi / self.window_step))


@dataclass(frozen=True)
class DescriptorStrategy:
    """Descriptor settings.

    sigma           global Gaussian weight (NEAREST, BILINEAR), in units of s
    subregion_sigma per-subregion Gaussian (OVERLAPPING), in units of s
    grid_sigma      weight over the 4x4 subregion grid (OVERLAPPING), in subregions
    """

    method: DescriptorMethod = DescriptorMethod.NEAREST
    sigma: float = 3.3
    subregion_sigma: float = 2.5
    grid_sigma: float = 1.5

    def __post_init__(self):
        object.__setattr__(self, "method", DescriptorMethod(self.method))
        if min(self.sigma, self.subregion_sigma, self.grid_sigma) <= 0:
            raise InvalidInputError("descriptor sigmas must be positive")

    @property
    def region_width(self) -> float:
        return 24.0 if self.method is DescriptorMethod.OVERLAPPING else 20.0


@dataclass(frozen=True, eq=False)
class Descriptor64:
    """Values ordered by subregion (row-major 4x4 grid), then
    (sum dx, sum dy, sum |dx|, sum |dy|)."""

    values: np.ndarray
    orientation: float


class Orientation(NamedTuple):
    angle: float
    degenerate: bool


def _wrap(angle):
    """Map atan2 output onto (-pi, pi]."""
    return np.where(angle <= -math.pi, math.pi, angle)


def _rounded(v):
    return np.floor(v + 0.5).astype(np.int64)


def _arrays(points):
    xs = np.array([p.x for p in points], dtype=np.float64)
    ys = np.array([p.y for p in points], dtype=np.float64)
    ss = np.array([p.scale for p in points], dtype=np.float64)
    return xs, ys, ss


def _half_widths(kernel, scales):
    return np.array([kernel.half_width(s) for s in scales], dtype=np.int64)


# -- orientation -----------------------------------------------------------------


@lru_cache(maxsize=16)
def _disk(radius: float):
    r = int(math.ceil(radius))
    j, i = np.mgrid[-r : r + 1, -r : r + 1]
    keep = i * i + j * j < radius * radius
    return i[keep].astype(np.float64), j[keep].astype(np.float64)


def _orientation_gradients(ii, xs, ys, ss, strat, kernel, policy, naive):
    oi, oj = _disk(strat.sample_radius)
    px = _rounded(xs[:, None] + oi[None, :] * ss[:, None])
    py = _rounded(ys[:, None] + oj[None, :] * ss[:, None])
    ks = _half_widths(kernel, ss)[:, None]
    gx, gy, crossed = gradient_samples(ii, px, py, ks, kernel.family, policy, naive=naive)
    w = np.exp(-(oi * oi + oj * oj) / (2.0 * strat.sigma**2))
    return gx * w, gy * w, crossed.any(axis=1)


def _sliding_window(wx, wy, starts):
    """Vector sum of the best pi/3 window, per row.

    A sample with angle a lies in the window starting at t when
    (a - t) mod 2 pi < pi/3.  Angles are sorted once per row and each window
    sum is read off prefix sums, so the cost is independent of how many
    samples a window holds.
    """
    n, m = wx.shape
    ang = np.arctan2(wy, wx)
    order = np.argsort(ang, axis=1, kind="stable")
    ang = np.take_along_axis(ang, order, axis=1)
    ext = np.concatenate([ang, ang + 2 * math.pi], axis=1)
    px = np.zeros((n, 2 * m + 1))
    py = np.zeros((n, 2 * m + 1))
    vx = np.take_along_axis(wx, order, axis=1)
    vy = np.take_along_axis(wy, order, axis=1)
    np.cumsum(np.concatenate([vx, vx], axis=1), axis=1, out=px[:, 1:])
    np.cumsum(np.concatenate([vy, vy], axis=1), axis=1, out=py[:, 1:])
    # One global search: row i is shifted by 13 i, which keeps rows disjoint
    # because every extended angle lies in [-pi, 3 pi].
    shift = 13.0 * np.arange(n)[:, None]
    flat = (ext + shift).ravel()
    base = (2 * m) * np.arange(n)[:, None]
    lo = np.searchsorted(flat, (starts[None, :] + shift).ravel()).reshape(n, -1) - base
    hi = np.searchsorted(flat, (starts[None, :] + WINDOW + shift).ravel()).reshape(n, -1) - base
    sx = np.take_along_axis(px, hi, axis=1) - np.take_along_axis(px, lo, axis=1)
    sy = np.take_along_axis(py, hi, axis=1) - np.take_along_axis(py, lo, axis=1)
    best = np.argmax(sx * sx + sy * sy, axis=1)[:, None]
    return np.take_along_axis(sx, best, axis=1)[:, 0], np.take_along_axis(sy, best, axis=1)[:, 0]


def orientations(
    ii: IntegralImage,
    points,
    strat: OrientationStrategy = OrientationStrategy(),
    kernel: DerivativeKernel = DerivativeKernel(),
    policy: BorderPolicy = BorderPolicy.ZERO_RESPONSE,
    *,
    naive: bool = False,
):
    """Batch orientation.  Returns (angles, degenerate, crossed) arrays."""
    policy = BorderPolicy(policy)
    xs, ys, ss = _arrays(points)
    if xs.size == 0:
        return np.zeros(0), np.zeros(0, dtype=bool), np.zeros(0, dtype=bool)
    wx, wy, crossed = _orientation_gradients(ii, xs, ys, ss, strat, kernel, policy, naive)
    if strat.method is OrientationMethod.AVERAGE_GRADIENT:
        sx, sy = wx.sum(axis=1), wy.sum(axis=1)
    else:
        sx, sy = _sliding_window(wx, wy, strat.window_starts)
    degenerate = ~np.any((wx != 0) | (wy != 0), axis=1)
    angles = np.where(degenerate, 0.0, _wrap(np.arctan2(sy, sx)))
    return angles, degenerate, crossed


def _single_orientation(ii, p, strat, kernel, policy):
    angles, degenerate, _ = orientations(ii, [p], strat, kernel, policy)
    return Orientation(float(angles[0]), bool(degenerate[0]))


def estimate_orientation_sliding(
    ii: IntegralImage,
    p,
    cfg: OrientationStrategy = OrientationStrategy(),
    kernel: DerivativeKernel = DerivativeKernel(),
    policy: BorderPolicy = BorderPolicy.ZERO_RESPONSE,
) -> Orientation:
    """Orientation of the pi/3 window with the largest summed gradient."""
    strat = OrientationStrategy(OrientationMethod.SLIDING_WINDOW, cfg.sample_radius, cfg.sigma, cfg.window_step)
    return _single_orientation(ii, p, strat, kernel, policy)


def estimate_orientation_average(
    ii: IntegralImage,
    p,
    cfg: OrientationStrategy = OrientationStrategy(OrientationMethod.AVERAGE_GRADIENT),
    kernel: DerivativeKernel = DerivativeKernel(),
    policy: BorderPolicy = BorderPolicy.ZERO_RESPONSE,
) -> Orientation:
    """atan2 of the Gaussian-weighted gradient sums over the sample disk."""
    strat = OrientationStrategy(OrientationMethod.AVERAGE_GRADIENT, cfg.sample_radius, cfg.sigma, cfg.window_step)
    return _single_orientation(ii, p, strat, kernel, policy)


# -- descriptor layouts -----------------------------------------------------------


def _gauss(d2, sigma):
    return np.exp(-d2 / (2.0 * sigma * sigma))


@lru_cache(maxsize=8)
def _nearest_layout(sigma: float):
    t = np.arange(20) + 0.5 - 10.0
    v, u = np.meshgrid(t, t, indexing="ij")
    u, v = u.ravel(), v.ravel()
    cell = (np.arange(20) // 5)
    cv, cu = np.meshgrid(cell, cell, indexing="ij")
    region = (cv * 4 + cu).ravel()
    W = np.zeros((16, u.size))
    W[region, np.arange(u.size)] = _gauss(u * u + v * v, sigma)
    return u, v, W


@lru_cache(maxsize=8)
def _overlapping_layout(sub_sigma: float, grid_sigma: float):
    # 24 x 24 distinct sample positions; subregion (a, b) uses the 9 x 9 block
    # centred on its own centre, so neighbouring subregions share samples.
    t = np.arange(24) + 0.5 - 12.0
    v, u = np.meshgrid(t, t, indexing="ij")
    u, v = u.ravel(), v.ravel()
    W = np.zeros((16, u.size))
    for a in range(4):
        for b in range(4):
            cv, cu = -7.5 + 5 * a, -7.5 + 5 * b
            near = (np.abs(u - cu) <= 4.5) & (np.abs(v - cv) <= 4.5)
            outer = _gauss((a - 1.5) ** 2 + (b - 1.5) ** 2, grid_sigma)
            W[a * 4 + b, near] = outer * _gauss((u[near] - cu) ** 2 + (v[near] - cv) ** 2, sub_sigma)
    return u, v, W


@lru_cache(maxsize=512)
def _bilinear_layout(count: int, sigma: float):
    # `count` samples per axis over the 20 s region (about one per pixel);
    # each spreads into the two nearest subregion centres along each axis.
    t = (np.arange(count) + 0.5) * (20.0 / count) - 10.0
    g = (t + 10.0) / 5.0 - 0.5
    b0 = np.floor(g).astype(np.int64)
    f = g - b0
    axis_w = np.zeros((4, count))
    for cell, wt in ((b0, 1.0 - f), (b0 + 1, f)):
        ok = (cell >= 0) & (cell < 4)
        axis_w[cell[ok], np.nonzero(ok)[0]] = wt[ok]
    v, u = np.meshgrid(t, t, indexing="ij")
    gw = _gauss(u * u + v * v, sigma)
    W = (axis_w[:, None, :, None] * axis_w[None, :, None, :]).reshape(16, count * count) * gw.ravel()
    return u.ravel(), v.ravel(), W


def bilinear_sample_count(scale: float) -> int:
    return max(1, int(math.ceil(20.0 * scale)))


def _layout_groups(strat, scales):
    """Yield (indices, (u, v, W)) groups of features sharing one layout."""
    if strat.method is DescriptorMethod.NEAREST:
        yield np.arange(scales.size), _nearest_layout(strat.sigma)
    elif strat.method is DescriptorMethod.OVERLAPPING:
        yield np.arange(scales.size), _overlapping_layout(strat.subregion_sigma, strat.grid_sigma)
    else:
        counts = np.array([bilinear_sample_count(s) for s in scales])
        for c in np.unique(counts):
            yield np.nonzero(counts == c)[0], _bilinear_layout(int(c), strat.sigma)


def _raw_descriptors(ii, xs, ys, ss, angles, strat, kernel, policy, naive):
    """Unnormalised (N, 64) descriptors plus a per-feature border-crossing flag."""
    n = xs.size
    out = np.zeros((n, 64))
    crossed = np.zeros(n, dtype=bool)
    ks_all = _half_widths(kernel, ss)
    for idx, (u, v, W) in _layout_groups(strat, ss):
        c, s = np.cos(angles[idx])[:, None], np.sin(angles[idx])[:, None]
        sc = ss[idx][:, None]
        px = _rounded(xs[idx][:, None] + (u[None, :] * c - v[None, :] * s) * sc)
        py = _rounded(ys[idx][:, None] + (u[None, :] * s + v[None, :] * c) * sc)
        gx, gy, cr = gradient_samples(ii, px, py, ks_all[idx][:, None], kernel.family, policy, naive=naive)
        dx = gx * c + gy * s
        dy = -gx * s + gy * c
        sums = np.stack([dx @ W.T, dy @ W.T, np.abs(dx) @ W.T, np.abs(dy) @ W.T], axis=2)
        out[idx] = sums.reshape(idx.size, 64)
        crossed[idx] = cr.any(axis=1)
    return out, crossed


def describe_many(
    ii: IntegralImage,
    points,
    angles,
    strat: DescriptorStrategy = DescriptorStrategy(),
    policy: BorderPolicy = BorderPolicy.ZERO_RESPONSE,
    kernel: DerivativeKernel = DerivativeKernel(),
    *,
    normalize: bool = True,
    naive: bool = False,
):
    """Batch description.  Returns (values (N, 64), zero mask, crossed mask).

    Rows whose raw vector is all zero are left as zeros and flagged.
    """
    policy = BorderPolicy(policy)
    xs, ys, ss = _arrays(points)
    angles = np.asarray(angles, dtype=np.float64).reshape(-1)
    if xs.size == 0:
        return np.zeros((0, 64)), np.zeros(0, dtype=bool), np.zeros(0, dtype=bool)
    if np.any(ss <= 0):
        raise InvalidInputError("feature scales must be positive")
    raw, crossed = _raw_descriptors(ii, xs, ys, ss, angles, strat, kernel, policy, naive)
    norms = np.sqrt(np.einsum("ij,ij->i", raw, raw))
    zero = norms == 0
    if normalize:
        raw = raw / np.where(zero, 1.0, norms)[:, None]
    return raw, zero, crossed


def describe(
    ii: IntegralImage,
    p,
    angle: float,
    strat: DescriptorStrategy = DescriptorStrategy(),
    policy: BorderPolicy = BorderPolicy.ZERO_RESPONSE,
    kernel: DerivativeKernel = DerivativeKernel(),
    *,
    normalize: bool = True,
) -> Descriptor64:
    """SURF-64 descriptor of one feature at a given orientation.

    Raises ZeroDescriptorError when every sampled gradient is zero.
    """
    values, zero, _ = describe_many(ii, [p], [angle], strat, policy, kernel, normalize=normalize)
    if zero[0]:
        raise ZeroDescriptorError(f"all-zero descriptor at ({p.x:.2f}, {p.y:.2f})")
    return Descriptor64(values[0], float(_wrap(np.float64(angle))))


@dataclass
class BatchResult:
    features: list  # (InterestPoint, Descriptor64) in input order
    dropped_zero: int = 0
    dropped_border: int = 0

    @property
    def dropped(self) -> int:
        return self.dropped_zero + self.dropped_border


def describe_batch(ii: IntegralImage, points, variant, *, naive: bool = False) -> BatchResult:
    """Orient and describe every point with the strategies held by `variant`.

    `variant` needs ``orientation``, ``descriptor``, ``border`` and ``kernel``
    attributes (a VariantConfig).  Features with an all-zero descriptor are
    dropped, and so are features whose samples touch the border under DISCARD.
    """
    points = list(points)
    policy = BorderPolicy(variant.border)
    angles, _, ocrossed = orientations(ii, points, variant.orientation, variant.kernel, policy, naive=naive)
    values, zero, dcrossed = describe_many(
        ii, points, angles, variant.descriptor, policy, variant.kernel, naive=naive
    )
    result = BatchResult([])
    discard = policy is BorderPolicy.DISCARD
    for i, p in enumerate(points):
        if discard and (ocrossed[i] or dcrossed[i]):
            result.dropped_border += 1
        elif zero[i]:
            result.dropped_zero += 1
        else:
            result.features.append((p, Descriptor64(values[i], float(angles[i]))))
    return result
