"""Synthetic images, homographies and sequences with known ground truth."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import ndimage, optimize, special

from .image import write_pgm


@dataclass(frozen=True)
class Blob:
    x: float
    y: float
    sigma: float
    amplitude: float = 1.0


def blob_image(width: int, height: int, blobs, background: float = 0.0) -> np.ndarray:
    """Sum of isotropic Gaussians on a constant background."""
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    img = np.full((height, width), float(background))
    for b in blobs:
        img += b.amplitude * np.exp(-((xx - b.x) ** 2 + (yy - b.y) ** 2) / (2.0 * b.sigma**2))
    return img


def blob_grid(rows: int = 5, cols: int = 5, sigma_min: float = 2.0, sigma_max: float = 10.0,
              cell: int = 96, amplitude: float = 200.0):
    """A rows x cols grid of bright blobs with geometrically spaced sizes.

    Returns (image, blobs).  Blob centres sit on half-cell positions so each
    blob has a clear margin on every side.
    """
    sigmas = np.geomspace(sigma_min, sigma_max, rows * cols)
    blobs = []
    for k, s in enumerate(sigmas):
        r, c = divmod(k, cols)
        blobs.append(Blob(x=(c + 0.5) * cell + 0.25, y=(r + 0.5) * cell - 0.25, sigma=float(s), amplitude=amplitude))
    return blob_image(cols * cell, rows * cell, blobs), blobs


def textured_image(width: int, height: int, seed: int = 0, smooth: float = 2.0,
                   levels: int = 256) -> np.ndarray:
    """Smoothed random texture quantised to integers in [0, levels)."""
    rng = np.random.default_rng(seed)
    noise = ndimage.gaussian_filter(rng.standard_normal((height, width)), smooth, mode="reflect")
    noise = (noise - noise.min()) / max(np.ptp(noise), 1e-12)
    return np.floor(noise * (levels - 1) + 0.5)


def translation(tx: float, ty: float) -> np.ndarray:
    return np.array([[1.0, 0.0, tx], [0.0, 1.0, ty], [0.0, 0.0, 1.0]])


def rotation_about(angle: float, cx: float, cy: float, zoom: float = 1.0) -> np.ndarray:
    """Rotation (and optional zoom) about (cx, cy) in image coordinates."""
    c, s = math.cos(angle) * zoom, math.sin(angle) * zoom
    return np.array([[c, -s, cx - c * cx + s * cy], [s, c, cy - s * cx - c * cy], [0.0, 0.0, 1.0]])


def warp(image, h, shape=None, order: int = 3, cval: float = 0.0) -> np.ndarray:
    """Resample `image` under the homography `h` (source -> destination)."""
    image = np.asarray(image, dtype=np.float64)
    height, width = shape if shape is not None else image.shape
    hinv = np.linalg.inv(np.asarray(h, dtype=np.float64))
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    pts = np.stack([xx.ravel(), yy.ravel(), np.ones(xx.size)])
    src = hinv @ pts
    sx, sy = src[0] / src[2], src[1] / src[2]
    out = ndimage.map_coordinates(image, [sy, sx], order=order, mode="constant", cval=cval, prefilter=True)
    return out.reshape(height, width)


def synthetic_sequence(seed: int = 0, size: int = 256, count: int = 4):
    """A textured image plus rotated/zoomed copies.  Returns (images, homographies)."""
    rng = np.random.default_rng(seed)
    base = textured_image(size, size, seed=int(rng.integers(1 << 31)))
    images, hs = [base], [np.eye(3)]
    for i in range(1, count):
        angle = float(rng.uniform(-0.4, 0.4))
        zoom = float(rng.uniform(0.9, 1.15))
        h = rotation_about(angle, size / 2, size / 2, zoom)
        images.append(np.clip(np.rint(warp(base, h)), 0, 255))
        hs.append(h)
    return images, hs


def write_sequence(directory, images, homographies) -> None:
    """Write img1.pgm ... imgN.pgm and H1to2p ... H1toNp."""
    os.makedirs(directory, exist_ok=True)
    for i, img in enumerate(images, start=1):
        write_pgm(os.path.join(directory, f"img{i}.pgm"), img)
    for i, h in enumerate(homographies[1:], start=2):
        np.savetxt(os.path.join(directory, f"H1to{i}p"), np.asarray(h, dtype=np.float64), fmt="%.17g")


def _box_mass(sigma, x1, x2, y1, y2):
    """Integral of exp(-(x^2 + y^2) / (2 sigma^2)) over a continuous box."""
    k = sigma * math.sqrt(2.0)
    fx = 0.5 * (special.erf(x2 / k) - special.erf(x1 / k))
    fy = 0.5 * (special.erf(y2 / k) - special.erf(y1 / k))
    return 2.0 * math.pi * sigma * sigma * fx * fy


def box_blob_response(sigma: float, filter_size: float) -> float:
    """Normalised Dxx at the centre of a unit Gaussian blob, from exact box
    integrals with lobe L/3 (continuous in L, no pixel sampling)."""
    lobe = filter_size / 3.0
    half_h = lobe - 0.5
    whole = _box_mass(sigma, -filter_size / 2, filter_size / 2, -half_h, half_h)
    middle = _box_mass(sigma, -lobe / 2, lobe / 2, -half_h, half_h)
    return (whole - 3.0 * middle) / (filter_size * filter_size)


def box_characteristic_scale(sigma: float) -> float:
    """Feature scale 1.2 L / 9 at which the box-filter determinant of a
    Gaussian blob of width `sigma` peaks over continuous L.

    Box filters peak near 0.7 sigma rather than at sigma, so this is the
    ground-truth scale a fast-Hessian detector should report for the blob.
    """
    # Dxy vanishes at the centre and Dyy = Dxx, so det = Dxx^2.
    res = optimize.minimize_scalar(
        lambda L: -box_blob_response(sigma, L) ** 2, bounds=(3.0, 40.0 * sigma), method="bounded",
        options={"xatol": 1e-6},
    )
    return 1.2 * float(res.x) / 9.0
