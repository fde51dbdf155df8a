"""Integral images, box sums, and the box-filter operators built on them.

Coordinates are (x, y) = (column, row) with the origin at the top-left pixel
and y pointing down.  The summed-area table is stored with one extra leading
row and column of zeros so the lookup at index -1 needs no special case.

Every map-style operator here has two implementations:

* the default split path evaluates all samples whose support lies inside the
  image with plain slicing or gathering and no per-sample bounds checks, and
  only sends the remaining border samples through the policy-aware code;
* ``naive=True`` visits every sample in a Python loop and bounds-checks every
  box.  It exists as the reference for the split path, and both must agree
  bit for bit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError
from .image import as_gray


class BorderPolicy(str, enum.Enum):
    """How operators behave when their support leaves the image.

    ZERO_PIXELS (A)    pixels outside the image read as 0.
    ZERO_RESPONSE (B)  any operator whose support crosses the border returns 0.
    CLAMP_EDGE (C)     the image is extended by replicating the nearest edge pixel.
    REFLECT (D)        mirror extension without repeating the edge pixel.
    DISCARD (E)        features touching the border are dropped; operators
                       behave as under ZERO_RESPONSE.
    """

    ZERO_PIXELS = "zero_pixels"
    ZERO_RESPONSE = "zero_response"
    CLAMP_EDGE = "clamp_edge"
    REFLECT = "reflect"
    DISCARD = "discard"

    @property
    def zeroes_crossing(self) -> bool:
        return self in (BorderPolicy.ZERO_RESPONSE, BorderPolicy.DISCARD)


class KernelFamily(str, enum.Enum):
    HAAR = "haar"
    SYMMETRIC = "symmetric"


def rnd(value: float) -> int:
    """Round half up by adding 0.5 and flooring."""
    return int(math.floor(value + 0.5))


@dataclass(frozen=True)
class DerivativeKernel:
    """First-derivative box kernel.

    HAAR is the two-lobe wavelet of side 2*rnd(s): lobes of rnd(s) columns
    that meet between pixels, so the kernel has no centre pixel.

    SYMMETRIC places lobes of k = rnd(radius*s) columns on either side of a
    zero-weight centre column, giving an odd width of 2k+1 (that is rnd(2rs)+1
    whenever rnd(2rs) is even) and a kernel that is odd-symmetric about the
    sampled pixel.
    """

    family: KernelFamily = KernelFamily.SYMMETRIC
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", KernelFamily(self.family))
        if not self.radius > 0:
            raise InvalidInputError("kernel radius must be positive")

    def half_width(self, scale: float) -> int:
        if self.family is KernelFamily.HAAR:
            return max(1, rnd(scale))
        return max(1, rnd(self.radius * scale))

    def width(self, scale: float) -> int:
        k = self.half_width(scale)
        return 2 * k if self.family is KernelFamily.HAAR else 2 * k + 1


@dataclass(frozen=True, eq=False)
class IntegralImage:
    """Summed-area table of a grayscale image.

    ``table[y + 1, x + 1]`` holds the sum of all pixels (i, j) with i <= x and
    j <= y; row 0 and column 0 are zero.
    """

    table: np.ndarray

    @property
    def height(self) -> int:
        return self.table.shape[0] - 1

    @property
    def width(self) -> int:
        return self.table.shape[1] - 1

    @property
    def values(self) -> np.ndarray:
        """Cumulative sums indexed ``values[y, x]``."""
        return self.table[1:, 1:]

    def at(self, x: int, y: int) -> float:
        """I_sum(x, y) with the convention I_sum(-1, .) = I_sum(., -1) = 0."""
        return float(self.table[y + 1, x + 1])


def build_integral(image) -> IntegralImage:
    img = as_gray(image)
    h, w = img.shape
    table = np.zeros((h + 1, w + 1), dtype=np.float64)
    np.cumsum(img, axis=0, out=table[1:, 1:])
    np.cumsum(table[1:, 1:], axis=1, out=table[1:, 1:])
    table.setflags(write=False)
    return IntegralImage(table)


# ---------------------------------------------------------------------------
# Rectangle sums


def _rect(S, x1, y1, x2, y2):
    # Argument order and the evaluation order below are shared by every code
    # path so that all of them round identically.
    return S[y2 + 1, x2 + 1] - S[y1, x2 + 1] - S[y2 + 1, x1] + S[y1, x1]


def rect_sum(ii: IntegralImage, x1: int, y1: int, x2: int, y2: int) -> float:
    """Sum of pixels in the inclusive rectangle [x1, x2] x [y1, y2]."""
    if x1 > x2 or y1 > y2:
        raise InvalidInputError(f"invalid rectangle ({x1}, {y1}, {x2}, {y2})")
    if x1 < 0 or y1 < 0 or x2 >= ii.width or y2 >= ii.height:
        raise InvalidInputError(
            f"rectangle ({x1}, {y1}, {x2}, {y2}) leaves the {ii.width}x{ii.height} image; "
            "use clipped_rect_sum with a border policy"
        )
    return float(_rect(ii.table, x1, y1, x2, y2))


class ClippedSum(NamedTuple):
    value: float
    crossed: bool


def _fold(a, b, n):
    """Reflect-101 pieces of an out-of-image range [a, b] (n >= 2)."""
    m = n - 1
    segs = []
    for k in range(a // m, b // m + 1):
        v0, v1 = max(a, k * m), min(b, (k + 1) * m - 1)
        if k % 2 == 0:
            segs.append((v0 - k * m, v1 - k * m, 1))
        else:
            segs.append(((k + 1) * m - v1, (k + 1) * m - v0, 1))
    return segs


def _axis_segments(a: int, b: int, n: int, policy: BorderPolicy):
    """Map the virtual index range [a, b] onto in-image segments.

    Returns a list of (lo, hi, multiplicity) with 0 <= lo <= hi < n.
    """
    if policy is BorderPolicy.CLAMP_EDGE or (policy is BorderPolicy.REFLECT and n == 1):
        segs = []
        left = max(0, min(b, -1) - a + 1)
        if left:
            segs.append((0, 0, left))
        lo, hi = max(a, 0), min(b, n - 1)
        if lo <= hi:
            segs.append((lo, hi, 1))
        right = max(0, b - max(a, n) + 1)
        if right:
            segs.append((n - 1, n - 1, right))
        return segs
    if policy is BorderPolicy.REFLECT:
        # The in-image part stays one segment so that a rectangle touching the
        # edge sums exactly as it does on the unchecked interior path.
        segs = _fold(a, min(b, -1), n) if a < 0 else []
        lo, hi = max(a, 0), min(b, n - 1)
        if lo <= hi:
            segs.append((lo, hi, 1))
        if b >= n:
            segs.extend(_fold(max(a, n), b, n))
        return segs
    lo, hi = max(a, 0), min(b, n - 1)
    return [(lo, hi, 1)] if lo <= hi else []


def _clipped(S, x1, y1, x2, y2, policy):
    h, w = S.shape[0] - 1, S.shape[1] - 1
    if x1 >= 0 and y1 >= 0 and x2 < w and y2 < h:
        return _rect(S, x1, y1, x2, y2), False
    total = 0.0
    for lx, hx, mx in _axis_segments(x1, x2, w, policy):
        for ly, hy, my in _axis_segments(y1, y2, h, policy):
            total = total + float(mx * my) * _rect(S, lx, ly, hx, hy)
    return total, True


def clipped_rect_sum(ii: IntegralImage, rect, policy: BorderPolicy) -> ClippedSum:
    """Rectangle sum that may extend past the image, resolved by `policy`.

    For ZERO_RESPONSE and DISCARD the value is the in-image (zero-padded) sum;
    ``crossed`` tells the calling operator that it must zero its response.
    """
    x1, y1, x2, y2 = (int(v) for v in rect)
    if x1 > x2 or y1 > y2:
        raise InvalidInputError(f"invalid rectangle ({x1}, {y1}, {x2}, {y2})")
    value, crossed = _clipped(ii.table, x1, y1, x2, y2, BorderPolicy(policy))
    return ClippedSum(float(value), crossed)


def _vec_fold(a, b, n):
    """Vectorised `_fold`; entries with a > b produce no valid pieces."""
    m = n - 1
    ka, kb = a // m, b // m
    count = np.where(a <= b, kb - ka + 1, 0)
    segs = []
    for j in range(int(count.max()) if count.size else 0):
        k = ka + j
        valid = j < count
        v0, v1 = np.maximum(a, k * m), np.minimum(b, (k + 1) * m - 1)
        even = k % 2 == 0
        lo = np.where(even, v0 - k * m, (k + 1) * m - v1)
        hi = np.where(even, v1 - k * m, (k + 1) * m - v0)
        segs.append((np.where(valid, lo, 0), np.where(valid, hi, 0), valid.astype(np.int64)))
    return segs


def _vec_axis_segments(a, b, n, policy):
    """Vectorised `_axis_segments`; invalid entries carry multiplicity 0."""
    if policy is BorderPolicy.CLAMP_EDGE or (policy is BorderPolicy.REFLECT and n == 1):
        zero = np.zeros_like(a)
        left = np.maximum(0, np.minimum(b, -1) - a + 1)
        lo, hi = np.maximum(a, 0), np.minimum(b, n - 1)
        mid = (lo <= hi).astype(np.int64)
        right = np.maximum(0, b - np.maximum(a, n) + 1)
        return [
            (zero, zero, left),
            (np.where(mid, lo, 0), np.where(mid, hi, 0), mid),
            (zero + (n - 1), zero + (n - 1), right),
        ]
    if policy is BorderPolicy.REFLECT:
        lo, hi = np.maximum(a, 0), np.minimum(b, n - 1)
        mid = (lo <= hi).astype(np.int64)
        left = _vec_fold(a, np.minimum(b, -1), n)
        right = _vec_fold(np.maximum(a, n), b, n)
        return left + [(np.where(mid, lo, 0), np.where(mid, hi, 0), mid)] + right
    lo, hi = np.maximum(a, 0), np.minimum(b, n - 1)
    ok = lo <= hi
    return [(np.where(ok, lo, 0), np.where(ok, hi, 0), ok.astype(np.int64))]


def _vec_rect(flat, stride, x1, y1, x2, y2):
    return (
        flat[(y2 + 1) * stride + x2 + 1]
        - flat[y1 * stride + x2 + 1]
        - flat[(y2 + 1) * stride + x1]
        + flat[y1 * stride + x1]
    )


def _vec_clipped(S, x1, y1, x2, y2, policy):
    """Border path: policy-resolved sums for arrays of rectangles."""
    h, w = S.shape[0] - 1, S.shape[1] - 1
    flat, stride = S.ravel(), w + 1
    total = np.zeros(x1.shape, dtype=np.float64)
    segx = _vec_axis_segments(x1, x2, w, policy)
    segy = _vec_axis_segments(y1, y2, h, policy)
    for lx, hx, mx in segx:
        for ly, hy, my in segy:
            total = total + (mx * my).astype(np.float64) * _vec_rect(flat, stride, lx, ly, hx, hy)
    return total


# ---------------------------------------------------------------------------
# Box operators
#
# An operator is a tuple of (weight, dx1, dy1, dx2, dy2) boxes relative to the
# sample point plus a normaliser; its value is sum(weight * box) / normaliser.


def hessian_boxes(filter_size: int):
    """Dxx, Dyy, Dxy box layouts for a fast-Hessian filter of side `filter_size`."""
    if filter_size < 9 or filter_size % 6 != 3:
        raise InvalidInputError(f"filter size must be >= 9 and 3 mod 6, got {filter_size}")
    lobe = filter_size // 3
    b = (filter_size - 1) // 2
    e = lobe - 1
    h = lobe // 2
    dxx = ((1.0, -b, -e, b, e), (-3.0, -h, -e, h, e))
    dyy = ((1.0, -e, -b, e, b), (-3.0, -e, -h, e, h))
    dxy = (
        (1.0, 1, -lobe, lobe, -1),
        (1.0, -lobe, 1, -1, lobe),
        (-1.0, -lobe, -lobe, -1, -1),
        (-1.0, 1, 1, lobe, lobe),
    )
    return dxx, dyy, dxy


def _operator_scalar(S, x, y, boxes, norm, policy):
    acc = None
    crossed = False
    for wgt, dx1, dy1, dx2, dy2 in boxes:
        v, c = _clipped(S, x + dx1, y + dy1, x + dx2, y + dy2, policy)
        crossed |= c
        acc = wgt * v if acc is None else acc + wgt * v
    if crossed and policy.zeroes_crossing:
        return 0.0, True
    return float(acc / norm), crossed


def _hessian_parts_scalar(S, x, y, filter_size, policy):
    dxx_b, dyy_b, dxy_b = hessian_boxes(filter_size)
    area = float(filter_size * filter_size)
    dxx, c1 = _operator_scalar(S, x, y, dxx_b, area, policy)
    dyy, c2 = _operator_scalar(S, x, y, dyy_b, area, policy)
    dxy, c3 = _operator_scalar(S, x, y, dxy_b, area, policy)
    return dxx, dyy, dxy, (c1 or c2 or c3)


def _det(dxx, dyy, dxy, weight):
    wdxy = weight * dxy
    return dxx * dyy - wdxy * wdxy


def hessian_response(
    ii: IntegralImage,
    x: int,
    y: int,
    filter_size: int,
    weight: float = 0.9,
    policy: BorderPolicy = BorderPolicy.ZERO_RESPONSE,
) -> float:
    """Approximate Hessian determinant Dxx*Dyy - (weight*Dxy)^2 at pixel (x, y).

    Each second derivative is normalised by the filter area.  Under the
    zeroing policies the whole determinant is 0 once any box crosses the
    border.
    """
    policy = BorderPolicy(policy)
    dxx, dyy, dxy, crossed = _hessian_parts_scalar(ii.table, x, y, filter_size, policy)
    if crossed and policy.zeroes_crossing:
        return 0.0
    return float(_det(dxx, dyy, dxy, weight))


def laplacian_sign(
    ii: IntegralImage,
    x: int,
    y: int,
    filter_size: int,
    policy: BorderPolicy = BorderPolicy.ZERO_RESPONSE,
) -> int:
    """sign(Dxx + Dyy) at one pixel: +1 for dark blobs, -1 for bright blobs."""
    policy = BorderPolicy(policy)
    dxx, dyy, _, crossed = _hessian_parts_scalar(ii.table, x, y, filter_size, policy)
    if crossed and policy.zeroes_crossing:
        return 0
    trace = dxx + dyy
    return int(trace > 0) - int(trace < 0)


# -- dense maps over a sampling grid ---------------------------------------


def _grid(n, step):
    return np.arange(0, n, step, dtype=np.int64)


def _interior_range(coords, lo_ext, hi_ext, n):
    """Index range [i0, i1) of grid coords whose support [c+lo, c+hi] fits."""
    ok = np.nonzero((coords + lo_ext >= 0) & (coords + hi_ext <= n - 1))[0]
    if ok.size == 0:
        return 0, 0
    return int(ok[0]), int(ok[-1]) + 1


def _support(boxes):
    return (
        min(b[1] for b in boxes),
        min(b[2] for b in boxes),
        max(b[3] for b in boxes),
        max(b[4] for b in boxes),
    )


def _operator_interior(S, ys, xs, boxes, norm, step):
    """Split-path interior: strided slices of the table, no bounds checks."""
    acc = None
    r0, r1 = int(ys[0]), int(ys[-1]) + 1
    c0, c1 = int(xs[0]), int(xs[-1]) + 1
    for wgt, dx1, dy1, dx2, dy2 in boxes:
        a = S[r0 + dy2 + 1 : r1 + dy2 + 1 : step, c0 + dx2 + 1 : c1 + dx2 + 1 : step]
        b = S[r0 + dy1 : r1 + dy1 : step, c0 + dx2 + 1 : c1 + dx2 + 1 : step]
        c = S[r0 + dy2 + 1 : r1 + dy2 + 1 : step, c0 + dx1 : c1 + dx1 : step]
        d = S[r0 + dy1 : r1 + dy1 : step, c0 + dx1 : c1 + dx1 : step]
        v = a - b - c + d
        acc = wgt * v if acc is None else acc + wgt * v
    return acc / norm


def _operator_border(S, ys, xs, boxes, norm, policy):
    """Split-path border: policy-aware sums for scattered points."""
    acc = None
    for wgt, dx1, dy1, dx2, dy2 in boxes:
        v = _vec_clipped(S, xs + dx1, ys + dy1, xs + dx2, ys + dy2, policy)
        acc = wgt * v if acc is None else acc + wgt * v
    return acc / norm


def _split_maps(ii, operators, step, policy):
    """Evaluate several operators sharing one grid; returns maps and crossed mask."""
    S = ii.table
    h, w = ii.height, ii.width
    ys, xs = _grid(h, step), _grid(w, step)
    support = _support([b for boxes, _ in operators for b in boxes])
    i0, i1 = _interior_range(ys, support[1], support[3], h)
    j0, j1 = _interior_range(xs, support[0], support[2], w)
    crossed = np.ones((ys.size, xs.size), dtype=bool)
    crossed[i0:i1, j0:j1] = False
    maps = [np.zeros((ys.size, xs.size)) for _ in operators]
    if i1 > i0 and j1 > j0:
        for out, (boxes, norm) in zip(maps, operators):
            out[i0:i1, j0:j1] = _operator_interior(S, ys[i0:i1], xs[j0:j1], boxes, norm, step)
    if not policy.zeroes_crossing:
        bi, bj = np.nonzero(crossed)
        if bi.size:
            for out, (boxes, norm) in zip(maps, operators):
                out[bi, bj] = _operator_border(S, ys[bi], xs[bj], boxes, norm, policy)
    return maps, crossed


def _naive_maps(ii, operators, step, policy):
    S = ii.table
    ys, xs = _grid(ii.height, step), _grid(ii.width, step)
    maps = [np.zeros((ys.size, xs.size)) for _ in operators]
    crossed = np.zeros((ys.size, xs.size), dtype=bool)
    for i, y in enumerate(ys.tolist()):
        for j, x in enumerate(xs.tolist()):
            for out, (boxes, norm) in zip(maps, operators):
                v, c = _operator_scalar(S, x, y, boxes, norm, policy)
                out[i, j] = v
                crossed[i, j] |= c
    return maps, crossed


def _hessian_operators(filter_size):
    area = float(filter_size * filter_size)
    return [(boxes, area) for boxes in hessian_boxes(filter_size)]


def hessian_map(
    ii: IntegralImage,
    filter_size: int,
    step: int = 1,
    weight: float = 0.9,
    policy: BorderPolicy = BorderPolicy.ZERO_RESPONSE,
    *,
    naive: bool = False,
) -> np.ndarray:
    """Hessian determinant at pixels (j*step, i*step); shape (ceil(H/step), ceil(W/step))."""
    policy = BorderPolicy(policy)
    build = _naive_maps if naive else _split_maps
    (dxx, dyy, dxy), crossed = build(ii, _hessian_operators(filter_size), step, policy)
    det = _det(dxx, dyy, dxy, weight)
    if policy.zeroes_crossing:
        det[crossed] = 0.0
    return det


def trace_map(
    ii: IntegralImage,
    filter_size: int,
    step: int = 1,
    policy: BorderPolicy = BorderPolicy.ZERO_RESPONSE,
) -> np.ndarray:
    """Dxx + Dyy on the full sampling grid (eager counterpart of laplacian_sign)."""
    policy = BorderPolicy(policy)
    ops = _hessian_operators(filter_size)[:2]
    (dxx, dyy), crossed = _split_maps(ii, ops, step, policy)
    trace = dxx + dyy
    if policy.zeroes_crossing:
        trace[crossed] = 0.0
    return trace


# -- first derivatives -----------------------------------------------------


def _gradient_boxes(k: int, family: KernelFamily):
    if family is KernelFamily.HAAR:
        dx = ((1.0, 0, -k, k - 1, k - 1), (-1.0, -k, -k, -1, k - 1))
        dy = ((1.0, -k, 0, k - 1, k - 1), (-1.0, -k, -k, k - 1, -1))
        return dx, dy, float(2 * k * k * k)
    dx = ((1.0, 1, -k, k, k), (-1.0, -k, -k, -1, k))
    dy = ((1.0, -k, 1, k, k), (-1.0, -k, -k, k, -1))
    return dx, dy, float((2 * k + 1) * k * (k + 1))


def gradient(
    ii: IntegralImage,
    x: int,
    y: int,
    scale: float,
    kernel: DerivativeKernel = DerivativeKernel(),
    policy: BorderPolicy = BorderPolicy.ZERO_RESPONSE,
) -> tuple[float, float]:
    """(d_x, d_y) at pixel (x, y), normalised so a unit-slope ramp reads 1."""
    if not scale > 0:
        raise InvalidInputError("scale must be positive")
    policy = BorderPolicy(policy)
    dx_b, dy_b, norm = _gradient_boxes(kernel.half_width(scale), kernel.family)
    gx, _ = _operator_scalar(ii.table, int(x), int(y), dx_b, norm, policy)
    gy, _ = _operator_scalar(ii.table, int(x), int(y), dy_b, norm, policy)
    return gx, gy


def gradient_samples(ii: IntegralImage, xs, ys, ks, family: KernelFamily, policy: BorderPolicy, *, naive=False):
    """Gradients at many integer pixels with per-sample half widths `ks`.

    Returns (gx, gy, crossed) arrays shaped like `xs`.
    """
    family, policy = KernelFamily(family), BorderPolicy(policy)
    xs, ys, ks = np.broadcast_arrays(
        np.asarray(xs, dtype=np.int64), np.asarray(ys, dtype=np.int64), np.asarray(ks, dtype=np.int64)
    )
    shape = xs.shape
    xs, ys, ks = xs.ravel(), ys.ravel(), ks.ravel()
    if naive:
        gx, gy, crossed = _naive_gradients(ii, xs, ys, ks, family, policy)
    else:
        gx, gy, crossed = _split_gradients(ii, xs, ys, ks, family, policy)
    return gx.reshape(shape), gy.reshape(shape), crossed.reshape(shape)


def _naive_gradients(ii, xs, ys, ks, family, policy):
    S = ii.table
    n = xs.size
    gx, gy = np.zeros(n), np.zeros(n)
    crossed = np.zeros(n, dtype=bool)
    for i in range(n):
        dx_b, dy_b, norm = _gradient_boxes(int(ks[i]), family)
        x, y = int(xs[i]), int(ys[i])
        gx[i], c1 = _operator_scalar(S, x, y, dx_b, norm, policy)
        gy[i], c2 = _operator_scalar(S, x, y, dy_b, norm, policy)
        crossed[i] = c1 or c2
    return gx, gy, crossed


def _gradient_terms(k, family):
    """Box offsets of the two lobes of d_x as arrays (d_y is the transpose)."""
    if family is KernelFamily.HAAR:
        pos = (0 * k, -k, k - 1, k - 1)
        neg = (-k, -k, -1 + 0 * k, k - 1)
        norm = (2 * k * k * k).astype(np.float64)
    else:
        pos = (1 + 0 * k, -k, k, k)
        neg = (-k, -k, -1 + 0 * k, k)
        norm = ((2 * k + 1) * k * (k + 1)).astype(np.float64)
    return pos, neg, norm


def _split_gradients(ii, xs, ys, ks, family, policy):
    S = ii.table
    h, w = ii.height, ii.width
    flat, stride = S.ravel(), w + 1
    hi_ext = ks - 1 if family is KernelFamily.HAAR else ks
    inside = (xs - ks >= 0) & (ys - ks >= 0) & (xs + hi_ext <= w - 1) & (ys + hi_ext <= h - 1)
    gx, gy = np.zeros(xs.size), np.zeros(xs.size)

    def lobes(x, y, k, rect):
        (p1, q1, p2, q2), (n1, m1, n2, m2), norm = _gradient_terms(k, family)
        # d_x: columns from the lobe offsets, rows symmetric; d_y is transposed.
        vx = 1.0 * rect(x + p1, y + q1, x + p2, y + q2)
        vx = vx + -1.0 * rect(x + n1, y + m1, x + n2, y + m2)
        vy = 1.0 * rect(x + q1, y + p1, x + q2, y + p2)
        vy = vy + -1.0 * rect(x + m1, y + n1, x + m2, y + n2)
        return vx / norm, vy / norm

    idx = np.nonzero(inside)[0]
    if idx.size:
        gx[idx], gy[idx] = lobes(
            xs[idx], ys[idx], ks[idx], lambda a, b, c, d: _vec_rect(flat, stride, a, b, c, d)
        )
    out = np.nonzero(~inside)[0]
    if out.size and not policy.zeroes_crossing:
        gx[out], gy[out] = lobes(
            xs[out], ys[out], ks[out], lambda a, b, c, d: _vec_clipped(S, a, b, c, d, policy)
        )
    return gx, gy, ~inside
